#include "mckm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <vector>

#include "mckm/cm.hpp"
#include "mckm/dataset.hpp"
#include "mckm/graph.hpp"
#include "mckm/kmeans.hpp"
#include "mckm/metrics.hpp"
#include "mckm/mps.hpp"
#include "mckm/oracles.hpp"
#include "mckm/pipeline.hpp"

namespace mckm {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Dataset random_instance(std::mt19937_64& rng, std::size_t max_n, std::size_t max_p) {
    std::uniform_int_distribution<std::size_t> nd(8, max_n), pd(1, max_p);
    const std::size_t n = nd(rng), p = pd(rng);
    Dataset ds;
    ds.points = Matrix(n, p);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) ds.points(i, j) = u(rng);
    return ds;
}

// a valid partition: clusters 1..k all nonempty
Partition random_partition(std::mt19937_64& rng, std::size_t n, int k) {
    Partition part;
    part.k = k;
    part.assignments.resize(n);
    for (int c = 0; c < k; ++c) part.assignments[static_cast<std::size_t>(c)] = c + 1;
    std::uniform_int_distribution<int> cd(1, k);
    for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i) part.assignments[i] = cd(rng);
    std::shuffle(part.assignments.begin(), part.assignments.end(), rng);
    return part;
}

// 1. kmeans_cost at centroids == pairwise_cost
CriterionResult cost_identity() {
    CriterionResult res;
    res.name = "cost identity";
    auto rng = make_rng(derive_seed(101, 0));
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Dataset ds = random_instance(rng, 100, 5);
        std::uniform_int_distribution<int> kd(1, 5);
        const Partition part = random_partition(rng, ds.n(), kd(rng));
        const PrototypeSet centers = update_centroids(ds, part, part.k);
        const double direct = kmeans_cost(ds, centers, part);
        const double pairwise = pairwise_cost(ds, part);
        const double rel = std::abs(direct - pairwise) / std::max(1e-300, std::abs(pairwise));
        worst = std::max(worst, rel);
    }
    res.passed = worst <= 1e-9;
    res.detail = "max relative deviation " + fmt(worst) + " over 50 instances (limit 1e-9)";
    return res;
}

// 2. Lloyd cost monotone; converged state re-entered is a one-iteration no-op
CriterionResult lloyd_fixed_point() {
    CriterionResult res;
    res.name = "lloyd monotone fixed point";
    auto rng = make_rng(derive_seed(102, 0));
    int bad_monotone = 0, bad_reentry = 0;
    for (int t = 0; t < 100; ++t) {
        const Dataset ds = random_instance(rng, 80, 4);
        std::uniform_int_distribution<int> kd(2, 6);
        const int k = kd(rng);
        const PrototypeSet init = kmeanspp_seed(ds, k, derive_seed(102, 1000 + t));
        LloydResult first = lloyd(ds, init, 1e-12, 500);
        for (std::size_t i = 1; i < first.cost_trace.size(); ++i)
            if (first.cost_trace[i] > first.cost_trace[i - 1]) ++bad_monotone;
        // drive to an exact fixed point, then one more pass must be a no-op
        for (int r = 0; r < 10 && first.stop != LloydStop::StableAssignments; ++r)
            first = lloyd(ds, first.prototypes, 1e-12, 500);
        if (first.stop != LloydStop::StableAssignments) {
            ++bad_reentry;
            continue;
        }
        const LloydResult again = lloyd(ds, first.prototypes, 1e-12, 1);
        const bool unchanged = again.cost == first.cost &&
                               again.partition.assignments == first.partition.assignments &&
                               again.prototypes.centers == first.prototypes.centers;
        if (!unchanged) ++bad_reentry;
    }
    res.passed = bad_monotone == 0 && bad_reentry == 0;
    res.detail = "monotonicity violations " + std::to_string(bad_monotone) +
                 ", re-entry violations " + std::to_string(bad_reentry) + " over 100 runs";
    return res;
}

// 3. D^2 selection frequencies on the {0,1,3} line
CriterionResult sampling_law() {
    CriterionResult res;
    res.name = "d2 sampling law";
    const std::vector<double> weights = {0.0, 1.0, 9.0};
    auto rng = make_rng(derive_seed(103, 0));
    const int draws = 100000;
    std::vector<int> counts(3, 0);
    for (int t = 0; t < draws; ++t) ++counts[d2_sample(weights, rng)];
    const double f0 = counts[0] / static_cast<double>(draws);
    const double f1 = counts[1] / static_cast<double>(draws);
    const double f2 = counts[2] / static_cast<double>(draws);
    res.passed = std::abs(f0 - 0.0) <= 0.01 && std::abs(f1 - 0.1) <= 0.01 &&
                 std::abs(f2 - 0.9) <= 0.01;
    res.detail = "frequencies (" + fmt(f0) + ", " + fmt(f1) + ", " + fmt(f2) +
                 ") vs (0, 0.1, 0.9) +/- 0.01";
    return res;
}

// 4. ADMM: gamma=0 identity, full-fusion mean, subgradient oracle, residuals
CriterionResult admm_solver() {
    CriterionResult res;
    res.name = "admm solver";
    auto rng = make_rng(derive_seed(104, 0));
    std::uniform_real_distribution<double> u(0.0, 1.0);

    auto random_nodes = [&](std::size_t m, std::size_t p) {
        Matrix v(m, p);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < p; ++j) v(i, j) = u(rng);
        return v;
    };

    // (a) gamma = 0 returns the inputs
    double dev_identity = 0.0;
    {
        const Matrix v = random_nodes(6, 3);
        const PairGraph g = build_pair_graph(v, 2, 0.9);
        CmConfig cfg;
        cfg.gamma = 0.0;
        const AdmmState st = admm_solve(v, g, cfg);
        for (std::size_t i = 0; i < v.rows(); ++i)
            for (std::size_t j = 0; j < v.cols(); ++j)
                dev_identity = std::max(dev_identity, std::abs(st.mu(i, j) - v(i, j)));
    }

    // (b) the full-fusion limit lands on the prototype mean
    double dev_mean = 0.0;
    {
        const Matrix v = random_nodes(5, 2);
        const PairGraph g = build_pair_graph(v, 4, 0.9);
        CmConfig cfg;
        cfg.gamma = 1000.0;
        cfg.tol = 1e-8;
        cfg.max_iter = 100000;
        const AdmmState st = admm_solve(v, g, cfg);
        std::vector<double> mean(v.cols(), 0.0);
        for (std::size_t i = 0; i < v.rows(); ++i)
            for (std::size_t j = 0; j < v.cols(); ++j)
                mean[j] += v(i, j) / static_cast<double>(v.rows());
        for (std::size_t i = 0; i < v.rows(); ++i) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < v.cols(); ++j) {
                const double d = st.mu(i, j) - mean[j];
                d2 += d * d;
            }
            dev_mean = std::max(dev_mean, std::sqrt(d2));
        }
    }

    // (c) objective vs an independent subgradient oracle, (d) residuals
    double dev_oracle = 0.0, worst_residual = 0.0;
    bool all_converged = true;
    std::uniform_real_distribution<double> gd(0.1, 0.5);
    for (int t = 0; t < 10; ++t) {
        const Matrix v = random_nodes(5, 2);
        const PairGraph g = build_pair_graph(v, 2, 0.9);
        const double gamma = gd(rng);
        CmConfig cfg;
        cfg.gamma = gamma;
        cfg.tol = 1e-9;
        cfg.max_iter = 200000;
        const AdmmState st = admm_solve(v, g, cfg);
        all_converged = all_converged && st.converged;
        worst_residual = std::max({worst_residual, st.primal_residual, st.dual_residual});

        std::vector<int> pa, pb;
        std::vector<double> w;
        for (const auto& pr : g.pairs) {
            pa.push_back(static_cast<int>(pr.a));
            pb.push_back(static_cast<int>(pr.b));
            w.push_back(pr.w);
        }
        const auto ref = oracle::merge_subgradient(v, pa, pb, w, gamma, 1000000);
        const double mine = cm_objective(v, g, gamma, st.mu);
        dev_oracle = std::max(dev_oracle, std::abs(mine - ref.objective));
    }

    res.passed = dev_identity <= 1e-8 && dev_mean <= 1e-6 && dev_oracle <= 1e-5 &&
                 all_converged && worst_residual <= 1e-6;
    res.detail = "identity dev " + fmt(dev_identity) + " (1e-8), fusion dev " + fmt(dev_mean) +
                 " (1e-6), oracle dev " + fmt(dev_oracle) + " (1e-5), residual " +
                 fmt(worst_residual) + " (1e-6)";
    return res;
}

// 5. sampling trace properties and the epsilon rule constant
CriterionResult sampling_stop_rule() {
    CriterionResult res;
    res.name = "sampling stop rule";
    int violations = 0;
    for (std::uint64_t t = 0; t < 30; ++t) {
        Dataset ds;
        if (t % 2 == 0) {
            GaussianGridSpec spec{2, 3, 40, 0.05};
            ds = generate_synthetic(spec, derive_seed(105, t));
        } else {
            auto rng = make_rng(derive_seed(105, 1000 + t));
            ds = random_instance(rng, 200, 3);
        }
        MpsConfig cfg;
        cfg.seed = derive_seed(105, 2000 + t);
        const MpsResult m = mps(ds, cfg);
        const auto& tr = m.reconstruction_trace;
        for (std::size_t s = 1; s < tr.size(); ++s)
            if (tr[s] > tr[s - 1]) ++violations;
        if (m.stop == MpsStop::EpsilonRule) {
            for (std::size_t s = 1; s < tr.size(); ++s) {
                const double rate = (tr[s - 1] - tr[s]) / tr[s - 1];
                const bool final_step = s + 1 == tr.size();
                if (final_step ? rate > m.epsilon : rate <= m.epsilon) ++violations;
            }
        }
        if (m.stop == MpsStop::ZeroResidual && tr.back() != 0.0) ++violations;
        if (m.s_star != static_cast<int>(tr.size())) ++violations;
    }
    const double eps = epsilon_from_rho(0.8, 150, 4);
    const double eps_dev = std::abs(eps - 0.051031);
    res.passed = violations == 0 && eps_dev <= 1e-6;
    res.detail = "trace violations " + std::to_string(violations) +
                 " over 30 runs; epsilon(150,4,0.8) off by " + fmt(eps_dev) + " (1e-6)";
    return res;
}

// 6. empirical approximation bound on a 2x2 grid
CriterionResult approximation_bound() {
    CriterionResult res;
    res.name = "approximation bound";
    GaussianGridSpec spec{2, 2, 50, 0.02};
    const Dataset ds = generate_synthetic(spec, 2024);
    double sum_jx = 0.0, sum_rhs = 0.0;
    int holds = 0;
    for (std::uint64_t t = 1; t <= 20; ++t) {
        MpsConfig cfg;
        cfg.seed = derive_seed(6, t);
        const MpsResult m = mps(ds, cfg);
        const BoundReport rep = check_bound(ds, m, 50, derive_seed(60, t));
        sum_jx += rep.j_x;
        sum_rhs += rep.rhs;
        holds += rep.holds ? 1 : 0;
    }
    res.passed = sum_jx / 20.0 <= sum_rhs / 20.0;
    res.detail = "mean J_X " + fmt(sum_jx / 20.0) + " vs mean bound " + fmt(sum_rhs / 20.0) +
                 "; holds per-run " + std::to_string(holds) + "/20";
    return res;
}

// 7. 3x5 grid: swept gamma reaches k*=15 with ARI >= 0.90 in >= 15/20 seeds
CriterionResult grid_recovery() {
    CriterionResult res;
    res.name = "grid recovery";
    GaussianGridSpec gen{3, 5, 50, 0.01};
    const Dataset ds = generate_synthetic(gen, 5);
    const Partition truth = ds.label_partition();
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        MpsConfig mcfg;
        mcfg.rho = 1.0;
        mcfg.seed = derive_seed(seed, hash_name("mps"));
        const MpsResult m = mps(ds, mcfg);
        bool hit = false;
        if (m.s_star < 15) continue;
        const PairGraph g =
            build_pair_graph(m.prototypes.centers, std::min(1, m.s_star - 1), 0.9);
        CmConfig cfg;
        auto probe = [&](double gamma, const AdmmState* warm, AdmmState& out) {
            cfg.gamma = gamma;
            out = admm_solve(m.prototypes.centers, g, cfg, warm);
            const Partition pp = extract_clusters(out.mu, cfg.eta);
            if (pp.k == 15 && !hit)
                hit = ari(truth, propagate_labels(m.partition, pp)) >= 0.90;
            return pp.k;
        };
        AdmmState state;
        bool warm = false;
        double prev_g = 0.0;
        int prev_k = m.s_star;
        for (double gamma = 0.002; gamma <= 0.3001 && !hit; gamma += 0.002) {
            AdmmState next;
            const int k = probe(gamma, warm ? &state : nullptr, next);
            state = std::move(next);
            warm = true;
            if (!hit && prev_k > 15 && k < 15) {
                // the sweep jumped the k=15 plateau: bisect the bracket
                double lo = prev_g, hi = gamma;
                while (hi - lo > 1e-4 && !hit) {
                    const double mid = 0.5 * (lo + hi);
                    AdmmState ms;
                    const int km = probe(mid, &state, ms);
                    if (km == 15) break;
                    (km > 15 ? lo : hi) = mid;
                }
            }
            prev_g = gamma;
            prev_k = k;
        }
        hits += hit ? 1 : 0;
    }
    res.passed = hits >= 15;
    res.detail = "recovered k*=15 with ARI >= 0.90 in " + std::to_string(hits) +
                 "/20 seeds (need 15)";
    return res;
}

// 8. iris medians over 20 seeds
CriterionResult iris_medians(const std::filesystem::path& data_dir) {
    CriterionResult res;
    res.name = "iris medians";
    const auto path = data_dir / "iris.csv";
    if (!std::filesystem::exists(path)) {
        res.passed = false;
        res.detail = "missing " + path.string();
        return res;
    }
    const Dataset iris = normalize(load_csv(path.string()));
    const Partition truth = iris.label_partition();
    std::vector<double> ks, fs, as;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        AlgorithmSpec spec;
        spec.algorithm = "mckm";
        spec.rho = 1.0;
        spec.q = 2;
        spec.gamma = 0.3;
        spec.seed = seed;
        const MckmOutcome out = run_mckm(iris, spec);
        ks.push_back(static_cast<double>(out.k_star));
        fs.push_back(f_star(truth, out.partition));
        as.push_back(ari(truth, out.partition));
    }
    const double mk = median(ks), mf = median(fs), ma = median(as);
    res.passed = mk == 3.0 && mf >= 0.85 && ma >= 0.65;
    res.detail = "median k* " + fmt(mk) + " (=3), F* " + fmt(mf) + " (>=0.85), ARI " + fmt(ma) +
                 " (>=0.65)";
    return res;
}

// 9. cost-gap comparison against smkm and plain k-means on the 3x5 grid
CriterionResult cost_gap_comparison() {
    CriterionResult res;
    res.name = "cost gap comparison";
    GaussianGridSpec gen{3, 5, 50, 0.01};
    const Dataset ds = generate_synthetic(gen, 5);
    const double tie = 1e-12;  // covers summation-order noise in the costs
    int le_smkm = 0, both_beat = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        AlgorithmSpec mspec;
        mspec.algorithm = "mckm";
        mspec.rho = 5.0;
        mspec.q = 1;
        mspec.gamma = 0.08;
        mspec.seed = seed;
        const double gap_m = run(ds, mspec).cost_gap;

        AlgorithmSpec sspec;
        sspec.algorithm = "smkm";
        sspec.k = 15;
        sspec.seed = seed;
        const double gap_s = run(ds, sspec).cost_gap;

        AlgorithmSpec kspec;
        kspec.algorithm = "kmeans";
        kspec.k = 15;
        kspec.seed = seed;
        const double gap_k = run(ds, kspec).cost_gap;

        if (gap_m <= gap_s + tie) ++le_smkm;
        if (gap_m < gap_k && gap_s < gap_k) ++both_beat;
    }
    res.passed = le_smkm >= 14 && both_beat >= 18;
    res.detail = "gap <= smkm in " + std::to_string(le_smkm) + "/20 (need 14); both beat " +
                 "k-means in " + std::to_string(both_beat) + "/20 (need 18)";
    return res;
}

// 10. metric implementations against pair-enumeration oracles
CriterionResult metric_oracles() {
    CriterionResult res;
    res.name = "metric oracles";
    auto rng = make_rng(derive_seed(110, 0));
    const std::size_t n = 12;
    std::uniform_int_distribution<int> kd(2, 5);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const Partition a = random_partition(rng, n, kd(rng));
        const Partition b = random_partition(rng, n, kd(rng));
        worst = std::max(worst,
                         std::abs(f_star(a, b) - oracle::f_star(a.assignments, b.assignments)));
        worst =
            std::max(worst, std::abs(nmi(a, b) - oracle::nmi(a.assignments, b.assignments)));
        worst =
            std::max(worst, std::abs(ari(a, b) - oracle::ari(a.assignments, b.assignments)));
    }
    double worst_identity = 0.0;
    std::uniform_int_distribution<int> kid(1, 4);
    for (int t = 0; t < 20; ++t) {
        const Partition a = random_partition(rng, n, kid(rng));
        // relabel clusters in reverse to keep membership identical
        Partition b = a;
        for (auto& c : b.assignments) c = a.k + 1 - c;
        worst_identity = std::max({worst_identity, std::abs(f_star(a, b) - 1.0),
                                   std::abs(nmi(a, b) - 1.0), std::abs(ari(a, b) - 1.0)});
    }
    res.passed = worst <= 1e-12 && worst_identity <= 1e-12;
    res.detail = "oracle deviation " + fmt(worst) + " (1e-12); identity deviation " +
                 fmt(worst_identity) + " (1e-12)";
    return res;
}

// 11. prototype count stays small on n=5000; wall-clock against cc logged only
CriterionResult prototype_scaling() {
    CriterionResult res;
    res.name = "prototype scaling";
    UnbalancedGaussiansSpec spec;
    spec.components = {{2500, 0.08, {0.0, 0.0}}, {2500, 0.08, {1.0, 0.0}}};
    const Dataset ds = generate_synthetic(spec, 77);

    AlgorithmSpec mspec;
    mspec.algorithm = "mckm";
    mspec.gamma = 0.5;
    mspec.seed = 3;
    const RunReport rm = run(ds, mspec);

    AlgorithmSpec cspec;
    cspec.algorithm = "cc";
    cspec.gamma = 0.5;
    cspec.max_iter = 100;  // a lower bound on cc's true cost: capped, not converged
    cspec.seed = 3;
    const RunReport rc = run(ds, cspec);

    const bool faster = rm.runtime_seconds < rc.runtime_seconds;
    res.passed = rm.s_star <= static_cast<int>(ds.n() / 20);
    res.detail = "s* " + std::to_string(rm.s_star) + " <= " + std::to_string(ds.n() / 20) +
                 "; wall " + fmt(rm.runtime_seconds) + "s vs cc " + fmt(rc.runtime_seconds) +
                 "s capped at 100 iterations (informational" +
                 std::string(faster ? ", faster" : ", NOT faster") + ")";
    return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    std::vector<CriterionResult> out;
    const auto push = [&](CriterionResult r) {
        r.id = static_cast<int>(out.size()) + 1;
        out.push_back(std::move(r));
        if (opts.log) {
            const auto& c = out.back();
            std::ostringstream line;
            line << (c.passed ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " ["
                 << fmt(c.seconds) << "s] " << c.detail;
            opts.log(line.str());
        }
    };
    const auto timed = [&](auto&& fn) {
        const auto t0 = Clock::now();
        CriterionResult r = fn();
        r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        push(std::move(r));
    };

    timed([] { return cost_identity(); });
    timed([] { return lloyd_fixed_point(); });
    timed([] { return sampling_law(); });
    timed([] { return admm_solver(); });
    timed([] { return sampling_stop_rule(); });
    timed([] { return approximation_bound(); });
    timed([] { return grid_recovery(); });
    timed([&] { return iris_medians(opts.data_dir); });
    timed([] { return cost_gap_comparison(); });
    timed([] { return metric_oracles(); });
    timed([] { return prototype_scaling(); });
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (r.hard && !r.passed) return false;
    return true;
}

}  // namespace mckm
