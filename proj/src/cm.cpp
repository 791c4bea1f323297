#include "mckm/cm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mckm {

namespace {

void validate_config(const CmConfig& cfg) {
    if (cfg.gamma < 0) throw std::invalid_argument("merge: gamma must be >= 0");
    if (cfg.nu <= 0) throw std::invalid_argument("merge: nu must be > 0");
    if (cfg.eta < 0) throw std::invalid_argument("merge: eta must be >= 0");
    if (cfg.tol <= 0) throw std::invalid_argument("merge: tol must be > 0");
    if (cfg.max_iter < 1) throw std::invalid_argument("merge: max_iter must be >= 1");
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

std::vector<double> block_soft_threshold(std::span<const double> v, double sigma) {
    if (sigma < 0) throw std::invalid_argument("block_soft_threshold: sigma must be >= 0");
    std::vector<double> out(v.size(), 0.0);
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm <= sigma) return out;  // fully shrunk to zero
    const double scale = 1.0 - sigma / norm;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = scale * v[i];
    return out;
}

double cm_objective(const Matrix& v, const PairGraph& graph, double gamma, const Matrix& mu) {
    double fidelity = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) fidelity += squared_distance(mu.row(i), v.row(i));
    double penalty = 0.0;
    for (const auto& pr : graph.pairs) {
        if (pr.w <= 0.0) continue;
        const double d = std::sqrt(squared_distance(mu.row(static_cast<std::size_t>(pr.a)),
                                                    mu.row(static_cast<std::size_t>(pr.b))));
        penalty += pr.w * d;
    }
    return 0.5 * fidelity + gamma * penalty;
}

AdmmState admm_solve(const Matrix& v, const PairGraph& graph, const CmConfig& cfg,
                     const AdmmState* warm) {
    validate_config(cfg);
    const std::size_t m = v.rows(), p = v.cols();
    if (m != graph.m) throw std::invalid_argument("admm_solve: graph built over a different node count");
    const std::size_t L = graph.pair_count();
    const double nu = cfg.nu;

    AdmmState st;
    if (warm) {
        if (warm->mu.rows() != m || warm->mu.cols() != p || warm->y.size() != L * p)
            throw std::invalid_argument("admm_solve: warm state shape mismatch");
        st.mu = warm->mu;
        st.y = warm->y;
        st.lambda = warm->lambda;
    } else {
        st.mu = v;
        st.y.resize(L * p);
        st.lambda.assign(L * p, 0.0);
        for (std::size_t l = 0; l < L; ++l) {
            const auto& pr = graph.pairs[l];
            auto va = v.row(static_cast<std::size_t>(pr.a));
            auto vb = v.row(static_cast<std::size_t>(pr.b));
            for (std::size_t j = 0; j < p; ++j) st.y[l * p + j] = va[j] - vb[j];
        }
    }

    std::vector<double> vbar(p, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto row = v.row(i);
        for (std::size_t j = 0; j < p; ++j) vbar[j] += row[j];
    }
    for (std::size_t j = 0; j < p; ++j) vbar[j] /= static_cast<double>(m);

    // mu update is exact: mu = (z + m*nu*vbar) / (1 + m*nu) with
    // z_i = v_i + sum_{pairs starting at i}(lambda + nu y) - sum_{pairs ending at i}(...)
    const double denom = 1.0 + static_cast<double>(m) * nu;
    const double z_coef = 1.0 / denom;
    const double vbar_coef = static_cast<double>(m) * nu / denom;

    Matrix z(m, p);
    std::vector<double> g(p);
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        // z accumulation
        std::copy(v.data(), v.data() + m * p, z.data());
        for (std::size_t l = 0; l < L; ++l) {
            const auto& pr = graph.pairs[l];
            auto za = z.row(static_cast<std::size_t>(pr.a));
            auto zb = z.row(static_cast<std::size_t>(pr.b));
            const double* yl = st.y.data() + l * p;
            const double* ll = st.lambda.data() + l * p;
            for (std::size_t j = 0; j < p; ++j) {
                const double t = ll[j] + nu * yl[j];
                za[j] += t;
                zb[j] -= t;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            auto mrow = st.mu.row(i);
            auto zrow = z.row(i);
            for (std::size_t j = 0; j < p; ++j) mrow[j] = z_coef * zrow[j] + vbar_coef * vbar[j];
        }

        // y and multiplier updates with residual accumulation
        double primal_sq = 0.0, dual_sq = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
            const auto& pr = graph.pairs[l];
            auto ma = st.mu.row(static_cast<std::size_t>(pr.a));
            auto mb = st.mu.row(static_cast<std::size_t>(pr.b));
            double* yl = st.y.data() + l * p;
            double* ll = st.lambda.data() + l * p;
            double norm_sq = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                g[j] = ma[j] - mb[j] - ll[j] / nu;
                norm_sq += g[j] * g[j];
            }
            const double sigma = cfg.gamma * pr.w / nu;
            const double norm = std::sqrt(norm_sq);
            const double scale = norm > sigma ? 1.0 - sigma / norm : 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double y_new = scale * g[j];
                const double dy = y_new - yl[j];
                dual_sq += dy * dy;
                const double r = y_new - ma[j] + mb[j];
                primal_sq += r * r;
                ll[j] += nu * r;
                yl[j] = y_new;
            }
        }
        st.primal_residual = std::sqrt(primal_sq);
        st.dual_residual = nu * std::sqrt(dual_sq);
        st.iterations = iter;
        if (std::max(st.primal_residual, st.dual_residual) <= cfg.tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

Partition extract_clusters(const Matrix& mu, double eta) {
    if (eta < 0) throw std::invalid_argument("extract_clusters: eta must be >= 0");
    const std::size_t m = mu.rows();
    if (m == 0) throw std::invalid_argument("extract_clusters: no centers");
    DisjointSet ds(m);
    const double eta_sq = eta * eta;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b)
            if (squared_distance(mu.row(a), mu.row(b)) <= eta_sq)
                ds.unite(static_cast<int>(a), static_cast<int>(b));
    Partition part;
    part.assignments.resize(m);
    std::vector<int> label(m, 0);
    int next = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const int root = ds.find(static_cast<int>(i));
        if (label[static_cast<std::size_t>(root)] == 0) label[static_cast<std::size_t>(root)] = ++next;
        part.assignments[i] = label[static_cast<std::size_t>(root)];
    }
    part.k = next;
    return part;
}

Partition propagate_labels(const Partition& sample_to_proto, const Partition& proto_to_cluster) {
    Partition out;
    out.k = proto_to_cluster.k;
    out.assignments.resize(sample_to_proto.assignments.size());
    for (std::size_t i = 0; i < sample_to_proto.assignments.size(); ++i) {
        const int pid = sample_to_proto.assignments[i];
        if (pid < 1 || static_cast<std::size_t>(pid) > proto_to_cluster.assignments.size())
            throw std::logic_error("propagate_labels: dangling prototype id");
        out.assignments[i] = proto_to_cluster.assignments[static_cast<std::size_t>(pid - 1)];
    }
    return out;
}

MergeResult convex_merge(const PrototypeSet& protos, const PairGraph& graph, const CmConfig& cfg) {
    MergeResult res;
    res.admm = admm_solve(protos.centers, graph, cfg);
    res.mu = res.admm.mu;
    res.proto_partition = extract_clusters(res.mu, cfg.eta);
    res.k_star = res.proto_partition.k;
    return res;
}

std::vector<FusionPoint> gamma_path(const Matrix& v, const PairGraph& graph, CmConfig cfg,
                                    const std::vector<double>& gammas) {
    if (gammas.empty()) throw std::invalid_argument("gamma_path: empty grid");
    for (std::size_t i = 0; i + 1 < gammas.size(); ++i)
        if (gammas[i + 1] <= gammas[i]) throw std::invalid_argument("gamma_path: grid must ascend");
    std::vector<FusionPoint> points;
    AdmmState state;
    bool have_state = false;
    for (double gamma : gammas) {
        cfg.gamma = gamma;
        state = admm_solve(v, graph, cfg, have_state ? &state : nullptr);
        have_state = true;
        const Partition part = extract_clusters(state.mu, cfg.eta);
        points.push_back({gamma, part.k});
    }
    return points;
}

ConvexClusterResult convex_cluster(const Dataset& ds, int q, double kappa, const CmConfig& cfg) {
    const std::size_t n = ds.n();
    if (n < 2) throw std::invalid_argument("convex_cluster: need at least two samples");
    const int q_eff = std::min<int>(q, static_cast<int>(n) - 1);
    const PairGraph graph = build_pair_graph(ds.points, q_eff, kappa);
    ConvexClusterResult res;
    res.admm = admm_solve(ds.points, graph, cfg);
    res.mu = res.admm.mu;
    res.partition = extract_clusters(res.mu, cfg.eta);
    res.k_star = res.partition.k;
    return res;
}

}  // namespace mckm
