#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mckm/dataset.hpp"
#include "mckm/kmeans.hpp"

namespace mckm {

struct MpsConfig {
    double rho = 1.0;
    std::optional<double> epsilon_override;  // must lie in (0,1) when set
    std::uint64_t seed = 0;
    bool drop_last = false;  // drop the prototype whose draw triggered the stop
    double lloyd_tol = 1e-6;
    int lloyd_max_iter = 300;
};

enum class MpsStop { EpsilonRule, ZeroResidual, Exhausted };

struct MpsResult {
    PrototypeSet prototypes;  // refined by Lloyd
    Partition partition;      // sample -> prototype
    int s_star = 0;
    std::vector<double> reconstruction_trace;  // R(s) for s = 1..,
    MpsStop stop = MpsStop::EpsilonRule;
    double epsilon = 0.0;
    double cost = 0.0;  // J_X at the refined prototypes
};

double epsilon_from_rho(double rho, std::size_t n, std::size_t p);

/// Sum of squared distances from each sample to its nearest prototype.
double reconstruction(const Dataset& ds, const PrototypeSet& protos);

/// Multi-prototypes sampling: D^2-grow prototypes until the relative drop in
/// reconstruction error falls below epsilon, then refine with Lloyd.
MpsResult mps(const Dataset& ds, const MpsConfig& cfg);

struct BoundReport {
    double j_x = 0.0;
    double j_opt_proxy = 0.0;
    std::size_t n_a = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool vacuous = false;  // epsilon >= 1 makes the bound empty
};

/// Empirical check of the approximation bound
///   J_X <= 2(1-eps) (3 J_opt + 2 n_a Delta),  Delta = eps * J_X,
/// with J_opt replaced by the best of `restarts` k-means++ runs at k = s*
/// (and the ground-truth partition cost when labels exist).
BoundReport check_bound(const Dataset& ds, const MpsResult& result, int restarts = 50,
                        std::uint64_t seed = 0);

}  // namespace mckm
