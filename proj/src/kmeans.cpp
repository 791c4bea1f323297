#include "mckm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mckm {

PrototypeSet prototypes_from_indices(const Dataset& ds, const std::vector<std::size_t>& idx) {
    PrototypeSet out;
    out.centers = Matrix(idx.size(), ds.dim());
    out.provenance.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = ds.points.row(idx[i]);
        std::copy(src.begin(), src.end(), out.centers.row(i).begin());
        out.provenance[i] = {CenterOrigin::SampledIndex, static_cast<std::ptrdiff_t>(idx[i])};
    }
    return out;
}

Partition assign(const Dataset& ds, const PrototypeSet& protos) {
    const std::size_t n = ds.n(), k = protos.count();
    if (k == 0) throw std::invalid_argument("assign: no centers");
    Partition part;
    part.k = static_cast<int>(k);
    part.assignments.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = ds.points.row(i);
        std::size_t best = 0;
        double best_d = squared_distance(x, protos.centers.row(0));
        for (std::size_t c = 1; c < k; ++c) {
            const double d = squared_distance(x, protos.centers.row(c));
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        part.assignments[i] = static_cast<int>(best) + 1;
    }
    return part;
}

std::vector<double> nearest_sq_distances(const Dataset& ds, const PrototypeSet& protos) {
    const std::size_t n = ds.n(), k = protos.count();
    if (k == 0) throw std::invalid_argument("nearest_sq_distances: no centers");
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = ds.points.row(i);
        double best = squared_distance(x, protos.centers.row(0));
        for (std::size_t c = 1; c < k; ++c)
            best = std::min(best, squared_distance(x, protos.centers.row(c)));
        d2[i] = best;
    }
    return d2;
}

PrototypeSet update_centroids(const Dataset& ds, const Partition& part, int k) {
    const std::size_t n = ds.n(), p = ds.dim();
    if (k < 1) throw std::invalid_argument("update_centroids: k must be >= 1");
    if (part.assignments.size() != n) throw std::invalid_argument("update_centroids: size mismatch");
    PrototypeSet out;
    out.centers = Matrix(static_cast<std::size_t>(k), p);
    out.provenance.assign(static_cast<std::size_t>(k), {CenterOrigin::CentroidUpdate, -1});
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int a = part.assignments[i];
        if (a < 1 || a > k) throw std::invalid_argument("update_centroids: assignment out of range");
        const std::size_t c = static_cast<std::size_t>(a - 1);
        sizes[c]++;
        auto x = ds.points.row(i);
        auto row = out.centers.row(c);
        for (std::size_t j = 0; j < p; ++j) row[j] += x[j];
    }
    std::vector<std::size_t> empties;
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (sizes[c] == 0) {
            empties.push_back(c);
            continue;
        }
        auto row = out.centers.row(c);
        for (std::size_t j = 0; j < p; ++j) row[j] /= static_cast<double>(sizes[c]);
    }
    if (!empties.empty()) {
        // re-seed each empty cluster with the sample farthest from its own
        // (already updated) center; ties to the lowest index, no sample reused
        std::vector<char> used(n, 0);
        for (std::size_t c : empties) {
            std::size_t pick = n;
            double best = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (used[i]) continue;
                const std::size_t home = static_cast<std::size_t>(part.assignments[i] - 1);
                if (sizes[home] == 0) continue;  // its center is still being seeded
                const double d = squared_distance(ds.points.row(i), out.centers.row(home));
                if (d > best) {
                    best = d;
                    pick = i;
                }
            }
            if (pick == n) throw std::runtime_error("update_centroids: cannot repair empty cluster");
            used[pick] = 1;
            auto src = ds.points.row(pick);
            std::copy(src.begin(), src.end(), out.centers.row(c).begin());
            out.provenance[c] = {CenterOrigin::SampledIndex, static_cast<std::ptrdiff_t>(pick)};
        }
    }
    return out;
}

double kmeans_cost(const Dataset& ds, const PrototypeSet& protos, const Partition& part) {
    double cost = 0.0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const std::size_t c = static_cast<std::size_t>(part.assignments[i] - 1);
        cost += squared_distance(ds.points.row(i), protos.centers.row(c));
    }
    return cost;
}

double pairwise_cost(const Dataset& ds, const Partition& part) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(part.k));
    for (std::size_t i = 0; i < part.assignments.size(); ++i)
        members[static_cast<std::size_t>(part.assignments[i] - 1)].push_back(i);
    double cost = 0.0;
    for (const auto& cluster : members) {
        if (cluster.empty()) continue;
        double inner = 0.0;  // over unordered pairs, doubled below for the ordered sum
        for (std::size_t a = 0; a < cluster.size(); ++a)
            for (std::size_t b = a + 1; b < cluster.size(); ++b)
                inner += squared_distance(ds.points.row(cluster[a]), ds.points.row(cluster[b]));
        cost += inner / static_cast<double>(cluster.size());
    }
    return cost;
}

LloydResult lloyd(const Dataset& ds, PrototypeSet init, double tol, int max_iter) {
    const std::size_t n = ds.n();
    const std::size_t k = init.count();
    if (k == 0 || k > n) throw std::invalid_argument("lloyd: need 1 <= k <= n");
    if (tol <= 0) throw std::invalid_argument("lloyd: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("lloyd: max_iter must be >= 1");

    LloydResult res;
    res.prototypes = std::move(init);
    res.stop = LloydStop::IterationLimit;
    double prev_cost = std::numeric_limits<double>::infinity();
    std::vector<int> prev_assign;
    for (int it = 0; it < max_iter; ++it) {
        Partition part = assign(ds, res.prototypes);
        const double cost = kmeans_cost(ds, res.prototypes, part);
        res.cost_trace.push_back(cost);
        res.iterations = it + 1;
        const bool stable = !prev_assign.empty() && prev_assign == part.assignments;
        res.prototypes = update_centroids(ds, part, static_cast<int>(k));
        res.partition = std::move(part);
        res.cost = cost;
        if (stable) {
            res.stop = LloydStop::StableAssignments;
            break;
        }
        if (prev_cost < std::numeric_limits<double>::infinity()) {
            const double drop = prev_cost - cost;
            if (drop <= tol * std::max(prev_cost, 1e-300)) {
                res.stop = LloydStop::CostTolerance;
                break;
            }
        }
        prev_cost = cost;
        prev_assign = res.partition.assignments;
    }
    return res;
}

std::size_t d2_sample(std::span<const double> weights, std::mt19937_64& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("d2_sample: negative weight");
        total += w;
    }
    if (!(total > 0)) throw std::invalid_argument("d2_sample: all weights are zero");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double target = unit(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0) continue;
        acc += weights[i];
        last_positive = i;
        if (acc >= target) return i;
    }
    return last_positive;  // guards against round-off at the top end
}

PrototypeSet uniform_seed(const Dataset& ds, int k, std::uint64_t seed) {
    const std::size_t n = ds.n();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("uniform_seed: need 1 <= k <= n");
    auto rng = make_rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> chosen;
    for (int c = 0; c < k; ++c) {
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        const std::size_t at = pick(rng);
        chosen.push_back(pool[at]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(at));
    }
    return prototypes_from_indices(ds, chosen);
}

PrototypeSet kmeanspp_seed(const Dataset& ds, int k, std::uint64_t seed) {
    const std::size_t n = ds.n();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("kmeanspp_seed: need 1 <= k <= n");
    auto rng = make_rng(seed);
    std::vector<std::size_t> chosen;
    std::vector<char> is_chosen(n, 0);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    chosen.push_back(first(rng));
    is_chosen[chosen.back()] = 1;
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < static_cast<std::size_t>(k)) {
        auto latest = ds.points.row(chosen.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(ds.points.row(i), latest));
            total += d2[i];
        }
        std::size_t next;
        if (total > 0) {
            next = d2_sample(d2, rng);
        } else {
            // every remaining point coincides with a chosen center
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i)
                if (!is_chosen[i]) rest.push_back(i);
            std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
            next = rest[pick(rng)];
        }
        chosen.push_back(next);
        is_chosen[next] = 1;
    }
    return prototypes_from_indices(ds, chosen);
}

}  // namespace mckm
