#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mckm/dataset.hpp"
#include "mckm/matrix.hpp"

namespace mckm {

enum class CenterOrigin { SampledIndex, CentroidUpdate };

struct CenterProvenance {
    CenterOrigin origin = CenterOrigin::CentroidUpdate;
    std::ptrdiff_t sample_index = -1;  // set when origin == SampledIndex
};

struct PrototypeSet {
    Matrix centers;  // k x p
    std::vector<CenterProvenance> provenance;

    std::size_t count() const { return centers.rows(); }
};

PrototypeSet prototypes_from_indices(const Dataset& ds, const std::vector<std::size_t>& idx);

enum class LloydStop { StableAssignments, CostTolerance, IterationLimit };

struct LloydResult {
    PrototypeSet prototypes;
    Partition partition;
    double cost = 0.0;
    int iterations = 0;
    std::vector<double> cost_trace;  // cost after each assignment step
    LloydStop stop = LloydStop::IterationLimit;
};

/// Nearest-center assignment; ties go to the lowest center index.
Partition assign(const Dataset& ds, const PrototypeSet& protos);

/// Squared distance from each sample to its nearest center.
std::vector<double> nearest_sq_distances(const Dataset& ds, const PrototypeSet& protos);

/// Centroid update. Empty clusters are re-seeded to the sample farthest from
/// its current center (ties to the lowest sample index, each sample used once).
PrototypeSet update_centroids(const Dataset& ds, const Partition& part, int k);

double kmeans_cost(const Dataset& ds, const PrototypeSet& protos, const Partition& part);

/// Equivalent pairwise form: sum_i 1/(2|C_i|) * sum over ordered pairs in C_i
/// of the squared distance. Matches kmeans_cost when centers are centroids.
double pairwise_cost(const Dataset& ds, const Partition& part);

LloydResult lloyd(const Dataset& ds, PrototypeSet init, double tol = 1e-6, int max_iter = 300);

/// One D^2 draw: index sampled proportionally to `weights` by inverse CDF.
/// All-zero weights are the caller's fallback case and throw here.
std::size_t d2_sample(std::span<const double> weights, std::mt19937_64& rng);

/// Uniform sample of k distinct indices as initial centers.
PrototypeSet uniform_seed(const Dataset& ds, int k, std::uint64_t seed);

/// k-means++ seeding: first center uniform, the rest D^2-sampled.
/// If every remaining distance is zero, falls back to a uniform draw
/// over not-yet-chosen indices.
PrototypeSet kmeanspp_seed(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace mckm
