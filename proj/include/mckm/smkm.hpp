#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mckm/dataset.hpp"
#include "mckm/kmeans.hpp"

namespace mckm {

struct SmkmStep {
    int cycle = 0;
    int split_cluster = 0;  // 1-based
    double split_gain = 0.0;
    int merge_a = 0;  // 1-based pair, a < b
    int merge_b = 0;
    double merge_delta = 0.0;  // f value; cost added by merging
    bool accepted = false;
    double cost_before = 0.0;
    double cost_after = 0.0;
};

struct SmkmResult {
    LloydResult result;
    std::vector<SmkmStep> steps;
    int cycles = 0;  // completed split/merge cycles (accepted or not)
};

struct SplitSelection {
    int cluster = 0;  // 1-based
    double gain = 0.0;
    Matrix sub_centers;           // 2 x p replacement pair
    std::vector<int> sub_assign;  // 1/2 per member, ordered by sample index
};

/// Best-gain cluster to split, refitting each candidate with three seeded
/// 2-means restarts. Empty when every cluster is a singleton (or coincident).
std::optional<SplitSelection> smkm_split_select(const Dataset& ds, const Partition& part,
                                                const PrototypeSet& protos, std::uint64_t seed);

struct MergeSelection {
    int a = 0;  // 1-based pair, a < b
    int b = 0;
    double delta = 0.0;  // cost added by the merge
    std::vector<double> merged_center;
};

/// Cheapest pair to merge, scoring each pair at its size-weighted mean
/// prototype. Empty when fewer than two clusters are populated.
std::optional<MergeSelection> smkm_merge_select(const Dataset& ds, const Partition& part,
                                                const PrototypeSet& protos);

/// Split/merge k-means: k-means++ + Lloyd, then repeated cycles of
/// best-gain split, best-delta merge and Lloyd refinement, keeping the
/// new state only when the cost strictly improves.
SmkmResult smkm(const Dataset& ds, int k, std::uint64_t seed, int max_cycles = 50);

}  // namespace mckm
