#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mckm/dataset.hpp"
#include "mckm/graph.hpp"
#include "mckm/kmeans.hpp"
#include "mckm/matrix.hpp"

namespace mckm {

struct CmConfig {
    double gamma = 0.5;
    double nu = 1.0;        // ADMM penalty
    double eta = 1e-6;      // merge threshold on ||mu_i - mu_j||
    double tol = 1e-6;      // residual tolerance
    int max_iter = 10000;
};

struct AdmmState {
    Matrix mu;                   // m x p consensus centers
    std::vector<double> y;       // pair-difference variables, pair-major (L x p)
    std::vector<double> lambda;  // multipliers, same layout
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// min over y of sigma*||y|| + 1/2*||y - v||^2: scales v toward 0,
/// exactly 0 once ||v|| <= sigma.
std::vector<double> block_soft_threshold(std::span<const double> v, double sigma);

/// 1/2 sum_i ||mu_i - v_i||^2 + gamma * sum_{a<b} w_ab ||mu_a - mu_b||.
double cm_objective(const Matrix& v, const PairGraph& graph, double gamma, const Matrix& mu);

/// ADMM on the merging problem. `warm` (if given) supplies the starting
/// mu/y/lambda, e.g. from the previous point of a gamma path.
AdmmState admm_solve(const Matrix& v, const PairGraph& graph, const CmConfig& cfg,
                     const AdmmState* warm = nullptr);

/// Connected components of { (i,j) : ||mu_i - mu_j|| <= eta }, labeled 1..k*
/// in order of first appearance.
Partition extract_clusters(const Matrix& mu, double eta);

/// Composes sample->prototype with prototype->cluster.
Partition propagate_labels(const Partition& sample_to_proto, const Partition& proto_to_cluster);

struct FusionPoint {
    double gamma = 0.0;
    int k_star = 0;
};

struct MergeResult {
    Matrix mu;                  // optimal centers
    Partition proto_partition;  // prototype -> merged cluster
    int k_star = 0;
    AdmmState admm;
};

MergeResult convex_merge(const PrototypeSet& protos, const PairGraph& graph, const CmConfig& cfg);

/// Solves the merge problem along an ascending gamma grid with warm starts.
std::vector<FusionPoint> gamma_path(const Matrix& v, const PairGraph& graph, CmConfig cfg,
                                    const std::vector<double>& gammas);

struct ConvexClusterResult {
    Partition partition;  // per sample
    int k_star = 0;
    Matrix mu;
    AdmmState admm;
};

/// Convex clustering baseline: every sample is its own node.
ConvexClusterResult convex_cluster(const Dataset& ds, int q, double kappa, const CmConfig& cfg);

}  // namespace mckm
