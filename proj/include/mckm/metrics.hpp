#pragma once

#include <vector>

#include "mckm/dataset.hpp"

namespace mckm {

/// counts(l, i) = number of samples in truth class l and predicted cluster i.
struct ContingencyTable {
    std::vector<std::vector<long long>> counts;  // k_true x k_pred
    std::vector<long long> class_sizes;          // row sums
    std::vector<long long> cluster_sizes;        // column sums
    long long n = 0;
};

ContingencyTable contingency(const Partition& truth, const Partition& pred);

/// Weighted best-match F-measure over truth classes.
double f_star(const Partition& truth, const Partition& pred);

/// Mutual information normalized by the geometric mean of the entropies
/// (natural log). Degenerate zero-entropy cases: 1 when the partitions are
/// identical up to relabeling, else 0.
double nmi(const Partition& truth, const Partition& pred);

/// Adjusted Rand index; zero-denominator convention matches nmi's.
double ari(const Partition& truth, const Partition& pred);

struct CostGapResult {
    double cost_pred = 0.0;   // J at the predicted partition
    double cost_truth = 0.0;  // J* at the ground-truth partition
    double gap = 0.0;         // |J - J*|
};

CostGapResult cost_gap(const Dataset& ds, const Partition& pred);

bool same_up_to_relabeling(const Partition& a, const Partition& b);

}  // namespace mckm
