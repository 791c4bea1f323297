#include "mckm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mckm {

std::size_t PairGraph::positive_count() const {
    std::size_t c = 0;
    for (const auto& pr : pairs)
        if (pr.w > 0.0) ++c;
    return c;
}

PairGraph build_pair_graph(const Matrix& points, int q, double kappa) {
    const std::size_t m = points.rows();
    if (m < 2) throw std::invalid_argument("build_pair_graph: need at least two nodes");
    if (q < 1 || static_cast<std::size_t>(q) > m - 1)
        throw std::invalid_argument("build_pair_graph: need 1 <= q <= m-1");
    if (kappa < 0) throw std::invalid_argument("build_pair_graph: kappa must be >= 0");

    PairGraph g;
    g.m = m;
    g.q = q;
    g.kappa = kappa;
    const std::size_t total = m * (m - 1) / 2;
    g.pairs.resize(total);
    for (std::size_t a = 0, at = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b, ++at)
            g.pairs[at] = {static_cast<int>(a), static_cast<int>(b), 0.0};

    // q nearest neighbors per node; distance ties broken by the lower index
    std::vector<char> in_union(total, 0);
    std::vector<std::pair<double, std::size_t>> cand(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t at = 0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            cand[at++] = {squared_distance(points.row(i), points.row(j)), j};
        }
        std::partial_sort(cand.begin(), cand.begin() + q, cand.end());
        for (int t = 0; t < q; ++t) {
            const std::size_t j = cand[static_cast<std::size_t>(t)].second;
            const std::size_t a = std::min(i, j), b = std::max(i, j);
            in_union[PairGraph::pair_index(a, b, m)] = 1;
        }
    }
    for (std::size_t at = 0; at < total; ++at) {
        if (!in_union[at]) continue;
        const auto& pr = g.pairs[at];
        const double d2 = squared_distance(points.row(static_cast<std::size_t>(pr.a)),
                                           points.row(static_cast<std::size_t>(pr.b)));
        g.pairs[at].w = std::exp(-kappa * d2);
    }
    return g;
}

}  // namespace mckm
