#include "mckm/mps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mckm {

double epsilon_from_rho(double rho, std::size_t n, std::size_t p) {
    if (rho <= 0) throw std::invalid_argument("epsilon_from_rho: rho must be > 0");
    if (n == 0 || p == 0) throw std::invalid_argument("epsilon_from_rho: empty dataset");
    return 1.0 / (rho * std::sqrt(static_cast<double>(n) * static_cast<double>(p)));
}

double reconstruction(const Dataset& ds, const PrototypeSet& protos) {
    if (protos.count() == 0) throw std::invalid_argument("reconstruction: no prototypes");
    const std::vector<double> d2 = nearest_sq_distances(ds, protos);
    return std::accumulate(d2.begin(), d2.end(), 0.0);
}

MpsResult mps(const Dataset& ds, const MpsConfig& cfg) {
    const std::size_t n = ds.n();
    if (n < 2) throw std::invalid_argument("mps: need at least two samples");
    if (cfg.epsilon_override && (*cfg.epsilon_override <= 0 || *cfg.epsilon_override >= 1))
        throw std::invalid_argument("mps: epsilon override must lie in (0,1)");
    const double eps = cfg.epsilon_override ? *cfg.epsilon_override
                                            : epsilon_from_rho(cfg.rho, n, ds.dim());

    auto rng = make_rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::vector<std::size_t> chosen{first(rng)};

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
        d2[i] = squared_distance(ds.points.row(i), ds.points.row(chosen[0]));
    double r_prev = std::accumulate(d2.begin(), d2.end(), 0.0);

    MpsResult res;
    res.epsilon = eps;
    res.reconstruction_trace.push_back(r_prev);
    res.stop = MpsStop::ZeroResidual;
    if (r_prev > 0) {
        while (true) {
            const std::size_t next = d2_sample(d2, rng);
            chosen.push_back(next);
            double r_cur = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], squared_distance(ds.points.row(i), ds.points.row(next)));
                r_cur += d2[i];
            }
            res.reconstruction_trace.push_back(r_cur);
            const double rate = (r_prev - r_cur) / r_prev;
            if (rate <= eps) {
                res.stop = MpsStop::EpsilonRule;
                if (cfg.drop_last && chosen.size() > 1) chosen.pop_back();
                break;
            }
            if (r_cur <= 0) {
                res.stop = MpsStop::ZeroResidual;
                break;
            }
            if (chosen.size() == n) {
                res.stop = MpsStop::Exhausted;
                break;
            }
            r_prev = r_cur;
        }
    }

    const PrototypeSet sampled = prototypes_from_indices(ds, chosen);
    LloydResult refined = lloyd(ds, sampled, cfg.lloyd_tol, cfg.lloyd_max_iter);
    res.prototypes = std::move(refined.prototypes);
    res.partition = std::move(refined.partition);
    res.cost = refined.cost;
    res.s_star = static_cast<int>(chosen.size());
    return res;
}

BoundReport check_bound(const Dataset& ds, const MpsResult& result, int restarts,
                        std::uint64_t seed) {
    BoundReport rep;
    rep.epsilon = result.epsilon;
    rep.j_x = result.cost;
    rep.vacuous = result.epsilon >= 1.0;

    const int k = result.s_star;
    if (restarts < 1) throw std::invalid_argument("check_bound: need at least one restart");
    LloydResult best_run = lloyd(ds, kmeanspp_seed(ds, k, derive_seed(seed, 0)));
    for (int r = 1; r < restarts; ++r) {
        LloydResult cand =
            lloyd(ds, kmeanspp_seed(ds, k, derive_seed(seed, static_cast<std::uint64_t>(r))));
        if (cand.cost < best_run.cost) best_run = std::move(cand);
    }
    rep.j_opt_proxy = best_run.cost;
    if (ds.has_labels()) {
        const Partition truth = ds.label_partition();
        const auto centers = update_centroids(ds, truth, truth.k);
        rep.j_opt_proxy = std::min(rep.j_opt_proxy, kmeans_cost(ds, centers, truth));
    }

    // n_a counts samples whose sampled center moved at least as far from the
    // reference (proxy) center as the sample itself sits from it
    std::size_t n_a = 0;
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto v = result.prototypes.centers.row(
            static_cast<std::size_t>(result.partition.assignments[i] - 1));
        const auto v_star = best_run.prototypes.centers.row(
            static_cast<std::size_t>(best_run.partition.assignments[i] - 1));
        const double center_shift = std::sqrt(squared_distance(v, v_star));
        const double sample_dist = std::sqrt(squared_distance(ds.points.row(i), v_star));
        if (center_shift >= sample_dist) ++n_a;
    }
    rep.n_a = n_a;
    rep.delta = rep.epsilon * rep.j_x;
    rep.rhs = 2.0 * (1.0 - rep.epsilon) *
              (3.0 * rep.j_opt_proxy + 2.0 * static_cast<double>(n_a) * rep.delta);
    rep.holds = rep.j_x <= rep.rhs;
    return rep;
}

}  // namespace mckm
