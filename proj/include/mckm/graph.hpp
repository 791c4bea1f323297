#pragma once

#include <cstddef>
#include <vector>

#include "mckm/matrix.hpp"

namespace mckm {

/// All m(m-1)/2 node pairs in canonical order (a < b, a-major), each carrying
/// its fusion weight: exp(-kappa * ||x_a - x_b||^2) when the pair is in the
/// union of q-nearest-neighbor sets, 0 otherwise. The merge solver couples
/// every pair, so the zero-weight ones are kept explicitly.
struct PairGraph {
    struct Pair {
        int a = 0;
        int b = 0;
        double w = 0.0;
    };

    std::size_t m = 0;
    int q = 0;
    double kappa = 0.0;
    std::vector<Pair> pairs;

    std::size_t pair_count() const { return pairs.size(); }
    std::size_t positive_count() const;

    static std::size_t pair_index(std::size_t a, std::size_t b, std::size_t m) {
        return a * m - a * (a + 1) / 2 + (b - a - 1);
    }
};

/// q-NN union edge set with Gaussian weights. Neighbor ties are broken by the
/// lower index. Requires 1 <= q <= m-1 (q is clamped to m-1 by callers that
/// shrink the node set).
PairGraph build_pair_graph(const Matrix& points, int q, double kappa);

}  // namespace mckm
