#include "mckm/metrics.hpp"

#include "mckm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mckm {

ContingencyTable contingency(const Partition& truth, const Partition& pred) {
    if (truth.assignments.size() != pred.assignments.size())
        throw std::invalid_argument("contingency: partitions over different sample counts");
    if (truth.assignments.empty()) throw std::invalid_argument("contingency: empty partitions");
    ContingencyTable t;
    t.n = static_cast<long long>(truth.assignments.size());
    t.counts.assign(static_cast<std::size_t>(truth.k),
                    std::vector<long long>(static_cast<std::size_t>(pred.k), 0));
    t.class_sizes.assign(static_cast<std::size_t>(truth.k), 0);
    t.cluster_sizes.assign(static_cast<std::size_t>(pred.k), 0);
    for (std::size_t s = 0; s < truth.assignments.size(); ++s) {
        const std::size_t l = static_cast<std::size_t>(truth.assignments[s] - 1);
        const std::size_t i = static_cast<std::size_t>(pred.assignments[s] - 1);
        t.counts[l][i]++;
        t.class_sizes[l]++;
        t.cluster_sizes[i]++;
    }
    return t;
}

bool same_up_to_relabeling(const Partition& a, const Partition& b) {
    if (a.assignments.size() != b.assignments.size()) return false;
    std::unordered_map<int, int> fwd, rev;
    for (std::size_t i = 0; i < a.assignments.size(); ++i) {
        const int x = a.assignments[i], y = b.assignments[i];
        auto [fit, fnew] = fwd.try_emplace(x, y);
        if (!fnew && fit->second != y) return false;
        auto [rit, rnew] = rev.try_emplace(y, x);
        if (!rnew && rit->second != x) return false;
    }
    return true;
}

double f_star(const Partition& truth, const Partition& pred) {
    const auto t = contingency(truth, pred);
    double total = 0.0;
    for (std::size_t l = 0; l < t.counts.size(); ++l) {
        if (t.class_sizes[l] == 0) continue;
        double best = 0.0;
        for (std::size_t i = 0; i < t.cluster_sizes.size(); ++i) {
            const double f = 2.0 * static_cast<double>(t.counts[l][i]) /
                             static_cast<double>(t.class_sizes[l] + t.cluster_sizes[i]);
            best = std::max(best, f);
        }
        total += static_cast<double>(t.class_sizes[l]) / static_cast<double>(t.n) * best;
    }
    return total;
}

double nmi(const Partition& truth, const Partition& pred) {
    const auto t = contingency(truth, pred);
    const double n = static_cast<double>(t.n);
    double mi = 0.0;
    for (std::size_t l = 0; l < t.counts.size(); ++l) {
        for (std::size_t i = 0; i < t.counts[l].size(); ++i) {
            const double c = static_cast<double>(t.counts[l][i]);
            if (c <= 0) continue;
            mi += c * std::log(n * c / (static_cast<double>(t.class_sizes[l]) *
                                        static_cast<double>(t.cluster_sizes[i])));
        }
    }
    double h_truth = 0.0, h_pred = 0.0;
    for (long long s : t.class_sizes)
        if (s > 0) h_truth -= static_cast<double>(s) * std::log(static_cast<double>(s) / n);
    for (long long s : t.cluster_sizes)
        if (s > 0) h_pred -= static_cast<double>(s) * std::log(static_cast<double>(s) / n);
    const double denom = std::sqrt(h_truth * h_pred);
    if (denom == 0.0) return same_up_to_relabeling(truth, pred) ? 1.0 : 0.0;
    return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(const Partition& truth, const Partition& pred) {
    const auto t = contingency(truth, pred);
    auto choose2 = [](long long v) -> long long { return v * (v - 1) / 2; };
    long long sum_cells = 0;
    for (const auto& row : t.counts)
        for (long long c : row) sum_cells += choose2(c);
    long long a = 0, b = 0;
    for (long long s : t.class_sizes) a += choose2(s);
    for (long long s : t.cluster_sizes) b += choose2(s);
    const long long total = choose2(t.n);
    // degenerate when (a+b)/2 == a*b/total, checked exactly
    const bool degenerate =
        total == 0 || static_cast<__int128>(total) * (a + b) == static_cast<__int128>(2) * a * b;
    if (degenerate) return same_up_to_relabeling(truth, pred) ? 1.0 : 0.0;
    const long double expected = static_cast<long double>(a) * static_cast<long double>(b) /
                                 static_cast<long double>(total);
    const long double index = static_cast<long double>(sum_cells) - expected;
    const long double max_index = (static_cast<long double>(a) + static_cast<long double>(b)) / 2.0L - expected;
    return static_cast<double>(index / max_index);
}

CostGapResult cost_gap(const Dataset& ds, const Partition& pred) {
    if (!ds.has_labels()) throw std::logic_error("cost_gap: dataset has no labels");
    CostGapResult r;
    r.cost_pred = pairwise_cost(ds, pred);
    r.cost_truth = pairwise_cost(ds, ds.label_partition());
    r.gap = std::abs(r.cost_pred - r.cost_truth);
    return r;
}

}  // namespace mckm
