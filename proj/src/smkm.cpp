#include "mckm/smkm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mckm {

namespace {

struct ClusterStats {
    double count = 0.0;
    std::vector<double> sum;
    double sumsq = 0.0;  // sum of ||x||^2
};

// J_C(v) = sum_{x in C} ||x - v||^2 via the expanded form
double cluster_cost_at(const ClusterStats& st, std::span<const double> v) {
    double vv = 0.0, vs = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        vv += v[j] * v[j];
        vs += v[j] * st.sum[j];
    }
    return st.sumsq - 2.0 * vs + st.count * vv;
}

std::vector<ClusterStats> collect_stats(const Dataset& ds, const Partition& part) {
    std::vector<ClusterStats> stats(static_cast<std::size_t>(part.k));
    for (auto& st : stats) st.sum.assign(ds.dim(), 0.0);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        auto& st = stats[static_cast<std::size_t>(part.assignments[i] - 1)];
        auto x = ds.points.row(i);
        st.count += 1.0;
        for (std::size_t j = 0; j < ds.dim(); ++j) st.sum[j] += x[j];
        st.sumsq += dot(x, x);
    }
    return stats;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset sub;
    sub.points = Matrix(idx.size(), ds.dim());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto src = ds.points.row(idx[i]);
        std::copy(src.begin(), src.end(), sub.points.row(i).begin());
    }
    return sub;
}

}  // namespace

std::optional<SplitSelection> smkm_split_select(const Dataset& ds, const Partition& part,
                                                const PrototypeSet& protos, std::uint64_t seed) {
    const std::size_t k = static_cast<std::size_t>(part.k);
    if (protos.count() != k) throw std::invalid_argument("smkm_split_select: k mismatch");
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < ds.n(); ++i)
        members[static_cast<std::size_t>(part.assignments[i] - 1)].push_back(i);
    const auto stats = collect_stats(ds, part);

    std::optional<SplitSelection> pick;
    for (std::size_t c = 0; c < k; ++c) {
        if (members[c].size() < 2) continue;
        Dataset sub = subset(ds, members[c]);
        std::optional<LloydResult> best;
        for (int r = 0; r < 3; ++r) {
            const auto s = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(c)),
                                       static_cast<std::uint64_t>(r));
            LloydResult cand = lloyd(sub, kmeanspp_seed(sub, 2, s));
            if (!best || cand.cost < best->cost) best = std::move(cand);
        }
        if (!best->partition.is_valid()) continue;  // coincident points, nothing to split
        const double before = cluster_cost_at(stats[c], protos.centers.row(c));
        const double gain = before - best->cost;
        if (!pick || gain > pick->gain) {
            pick = SplitSelection{static_cast<int>(c) + 1, gain, best->prototypes.centers,
                                  best->partition.assignments};
        }
    }
    return pick;
}

std::optional<MergeSelection> smkm_merge_select(const Dataset& ds, const Partition& part,
                                                const PrototypeSet& protos) {
    const std::size_t k = static_cast<std::size_t>(part.k);
    if (protos.count() != k) throw std::invalid_argument("smkm_merge_select: k mismatch");
    const auto stats = collect_stats(ds, part);
    const std::size_t p = ds.dim();

    std::optional<MergeSelection> pick;
    std::vector<double> merged(p);
    for (std::size_t a = 0; a + 1 < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const double na = stats[a].count, nb = stats[b].count;
            if (na == 0 || nb == 0) continue;
            auto va = protos.centers.row(a), vb = protos.centers.row(b);
            for (std::size_t j = 0; j < p; ++j) merged[j] = (na * va[j] + nb * vb[j]) / (na + nb);
            ClusterStats both;
            both.count = na + nb;
            both.sumsq = stats[a].sumsq + stats[b].sumsq;
            both.sum.resize(p);
            for (std::size_t j = 0; j < p; ++j) both.sum[j] = stats[a].sum[j] + stats[b].sum[j];
            const double delta = cluster_cost_at(both, merged) - cluster_cost_at(stats[a], va) -
                                 cluster_cost_at(stats[b], vb);
            if (!pick || delta < pick->delta)
                pick = MergeSelection{static_cast<int>(a) + 1, static_cast<int>(b) + 1, delta, merged};
        }
    }
    return pick;
}

SmkmResult smkm(const Dataset& ds, int k, std::uint64_t seed, int max_cycles) {
    const std::size_t n = ds.n();
    if (k < 2 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("smkm: need 2 <= k <= n");
    if (max_cycles < 0) throw std::invalid_argument("smkm: max_cycles must be >= 0");

    SmkmResult out;
    {
        auto init = kmeanspp_seed(ds, k, derive_seed(seed, hash_name("smkm-init")));
        out.result = lloyd(ds, init);
    }

    for (int cycle = 1; cycle <= max_cycles; ++cycle) {
        const auto split = smkm_split_select(ds, out.result.partition, out.result.prototypes,
                                             derive_seed(seed, static_cast<std::uint64_t>(cycle)));
        if (!split) break;

        // grow to k+1 clusters: the split cluster keeps its id, the second
        // half takes id k+1
        Partition grown;
        grown.k = k + 1;
        grown.assignments = out.result.partition.assignments;
        {
            std::size_t at = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (out.result.partition.assignments[i] != split->cluster) continue;
                if (split->sub_assign[at] == 2) grown.assignments[i] = k + 1;
                ++at;
            }
        }
        PrototypeSet grown_protos;
        grown_protos.centers = Matrix(static_cast<std::size_t>(k) + 1, ds.dim());
        grown_protos.provenance.assign(static_cast<std::size_t>(k) + 1,
                                       {CenterOrigin::CentroidUpdate, -1});
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            auto src = out.result.prototypes.centers.row(c);
            std::copy(src.begin(), src.end(), grown_protos.centers.row(c).begin());
        }
        {
            auto s0 = split->sub_centers.row(0);
            auto s1 = split->sub_centers.row(1);
            std::copy(s0.begin(), s0.end(),
                      grown_protos.centers.row(static_cast<std::size_t>(split->cluster - 1)).begin());
            std::copy(s1.begin(), s1.end(),
                      grown_protos.centers.row(static_cast<std::size_t>(k)).begin());
        }

        const auto merge = smkm_merge_select(ds, grown, grown_protos);
        if (!merge) break;

        // drop row b, put the weighted mean at a, then refine with Lloyd
        PrototypeSet refit;
        refit.centers = Matrix(static_cast<std::size_t>(k), ds.dim());
        refit.provenance.assign(static_cast<std::size_t>(k), {CenterOrigin::CentroidUpdate, -1});
        for (std::size_t c = 0, at = 0; c <= static_cast<std::size_t>(k); ++c) {
            if (c == static_cast<std::size_t>(merge->b - 1)) continue;
            auto src = c == static_cast<std::size_t>(merge->a - 1)
                           ? std::span<const double>(merge->merged_center)
                           : std::span<const double>(grown_protos.centers.row(c));
            std::copy(src.begin(), src.end(), refit.centers.row(at).begin());
            ++at;
        }

        LloydResult candidate = lloyd(ds, std::move(refit));
        SmkmStep step;
        step.cycle = cycle;
        step.split_cluster = split->cluster;
        step.split_gain = split->gain;
        step.merge_a = merge->a;
        step.merge_b = merge->b;
        step.merge_delta = merge->delta;
        step.cost_before = out.result.cost;
        step.cost_after = candidate.cost;
        step.accepted = candidate.cost < out.result.cost;
        out.steps.push_back(step);
        out.cycles = cycle;
        if (!step.accepted) break;  // rollback: keep the previous state
        out.result = std::move(candidate);
    }
    return out;
}

}  // namespace mckm
