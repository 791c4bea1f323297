#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mckm/cm.hpp"
#include "mckm/dataset.hpp"
#include "mckm/metrics.hpp"
#include "mckm/mps.hpp"

namespace mckm {

struct AlgorithmSpec {
    std::string algorithm;  // kmeans | kmeanspp | smkm | mckm | cc
    std::optional<int> k;   // required for kmeans/kmeanspp/smkm
    double rho = 1.0;
    double gamma = 0.5;
    std::optional<int> q;  // default 2 for mckm, 5 for cc
    double kappa = 0.9;
    double nu = 1.0;
    double eta = 1e-6;
    double tol = 1e-6;
    int max_iter = 10000;
    std::optional<double> epsilon;  // overrides the rho rule
    bool drop_last = false;
    int max_cycles = 50;  // smkm
    std::uint64_t seed = 0;

    int effective_q() const { return q ? *q : (algorithm == "cc" ? 5 : 2); }

    /// Throws std::invalid_argument on unknown algorithms or out-of-range
    /// parameters (the CLI maps that to a usage error).
    void validate() const;
};

struct StageTimings {
    double sampling = 0.0;
    double graph = 0.0;
    double merge = 0.0;
    double total = 0.0;
};

struct RunReport {
    std::string dataset;
    std::string algorithm;
    AlgorithmSpec spec;
    std::uint64_t seed = 0;
    int k_star = 0;
    Partition partition;
    bool has_metrics = false;
    double f_star = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double cost = 0.0;      // pairwise form
    double cost_gap = 0.0;  // |J - J*|; 0 when no labels
    double runtime_seconds = 0.0;
    StageTimings stages;
    // mckm / cc details
    int s_star = 0;
    int admm_iterations = 0;
    bool admm_converged = true;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

struct MckmOutcome {
    MpsResult sampling;
    MergeResult merge;
    Partition partition;  // per sample
    int k_star = 0;
    StageTimings stages;
};

/// Full pipeline: sampling stage, prototype graph, convex merging, label
/// propagation. q is clamped to s*-1 when the prototype set is small.
MckmOutcome run_mckm(const Dataset& ds, const AlgorithmSpec& spec);

RunReport run(const Dataset& ds, const AlgorithmSpec& spec);

std::string report_to_json(const RunReport& report, const std::string& assignments_path);

}  // namespace mckm
