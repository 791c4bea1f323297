#pragma once

// Reference implementations used only to cross-check the fast paths.
// Everything here is written directly from the definitions (exhaustive
// scans, pair counting, subgradient descent) and deliberately does not
// include any of the production headers beyond the raw matrix type.

#include <cstdint>
#include <vector>

#include "mckm/matrix.hpp"

namespace mckm::oracle {

/// Exhaustive nearest-center scan; ties to the lowest center index.
std::vector<int> nearest_assign(const Matrix& points, const Matrix& centers);

double f_star(const std::vector<int>& truth, const std::vector<int>& pred);
double nmi(const std::vector<int>& truth, const std::vector<int>& pred);
/// ARI via explicit pair counting over all n(n-1)/2 sample pairs.
double ari(const std::vector<int>& truth, const std::vector<int>& pred);

struct SubgradientResult {
    Matrix mu;           // best iterate
    double objective = 0.0;
};

/// Objective evaluated from the definition:
/// 1/2 sum ||mu_i - v_i||^2 + gamma * sum_{a<b} w_ab ||mu_a - mu_b||.
double merge_objective(const Matrix& v, const std::vector<int>& pair_a,
                       const std::vector<int>& pair_b, const std::vector<double>& w,
                       double gamma, const Matrix& mu);

/// Projected subgradient descent with the 2/(t+1) step rule for strongly
/// convex objectives, tracking the best iterate.
SubgradientResult merge_subgradient(const Matrix& v, const std::vector<int>& pair_a,
                                    const std::vector<int>& pair_b, const std::vector<double>& w,
                                    double gamma, long iterations);

}  // namespace mckm::oracle
