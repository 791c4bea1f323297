#include "mckm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "mckm/smkm.hpp"

namespace mckm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void AlgorithmSpec::validate() const {
    static const char* known[] = {"kmeans", "kmeanspp", "smkm", "mckm", "cc"};
    if (std::find(std::begin(known), std::end(known), algorithm) == std::end(known))
        throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    const bool needs_k = algorithm == "kmeans" || algorithm == "kmeanspp" || algorithm == "smkm";
    if (needs_k) {
        if (!k) throw std::invalid_argument(algorithm + " requires k");
        if (*k < 1) throw std::invalid_argument("k must be >= 1");
        if (algorithm == "smkm" && *k < 2) throw std::invalid_argument("smkm requires k >= 2");
    } else if (k) {
        throw std::invalid_argument(algorithm + " estimates k and does not accept one");
    }
    if (rho <= 0) throw std::invalid_argument("rho must be > 0");
    if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
    if (q && *q < 1) throw std::invalid_argument("q must be >= 1");
    if (kappa < 0) throw std::invalid_argument("kappa must be >= 0");
    if (nu <= 0) throw std::invalid_argument("nu must be > 0");
    if (eta < 0) throw std::invalid_argument("eta must be >= 0");
    if (tol <= 0) throw std::invalid_argument("tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (max_cycles < 0) throw std::invalid_argument("max_cycles must be >= 0");
    if (epsilon && (*epsilon <= 0 || *epsilon >= 1))
        throw std::invalid_argument("epsilon must lie in (0,1)");
}

MckmOutcome run_mckm(const Dataset& ds, const AlgorithmSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    MckmOutcome out;

    MpsConfig mcfg;
    mcfg.rho = spec.rho;
    mcfg.epsilon_override = spec.epsilon;
    mcfg.seed = derive_seed(spec.seed, hash_name("mps"));
    mcfg.drop_last = spec.drop_last;
    out.sampling = mps(ds, mcfg);
    out.stages.sampling = seconds_since(t0);

    CmConfig ccfg;
    ccfg.gamma = spec.gamma;
    ccfg.nu = spec.nu;
    ccfg.eta = spec.eta;
    ccfg.tol = spec.tol;
    ccfg.max_iter = spec.max_iter;

    const int s = out.sampling.s_star;
    if (s < 2) {
        // a single prototype already explains the data; nothing to merge
        out.merge.mu = out.sampling.prototypes.centers;
        out.merge.proto_partition = Partition{std::vector<int>(static_cast<std::size_t>(s), 1), 1};
        out.merge.k_star = 1;
        out.merge.admm.mu = out.merge.mu;
        out.merge.admm.converged = true;
    } else {
        const auto tg = std::chrono::steady_clock::now();
        const int q_eff = std::min(spec.effective_q(), s - 1);
        const PairGraph graph = build_pair_graph(out.sampling.prototypes.centers, q_eff, spec.kappa);
        out.stages.graph = seconds_since(tg);
        const auto tm = std::chrono::steady_clock::now();
        out.merge = convex_merge(out.sampling.prototypes, graph, ccfg);
        out.stages.merge = seconds_since(tm);
    }
    out.partition = propagate_labels(out.sampling.partition, out.merge.proto_partition);
    out.k_star = out.merge.k_star;
    out.stages.total = seconds_since(t0);
    return out;
}

RunReport run(const Dataset& ds, const AlgorithmSpec& spec) {
    spec.validate();
    RunReport rep;
    rep.dataset = ds.name;
    rep.algorithm = spec.algorithm;
    rep.spec = spec;
    rep.seed = spec.seed;

    const auto t0 = std::chrono::steady_clock::now();
    if (spec.algorithm == "kmeans" || spec.algorithm == "kmeanspp") {
        const auto seed = derive_seed(spec.seed, hash_name(spec.algorithm));
        auto init = spec.algorithm == "kmeans" ? uniform_seed(ds, *spec.k, seed)
                                               : kmeanspp_seed(ds, *spec.k, seed);
        LloydResult res = lloyd(ds, std::move(init));
        rep.partition = std::move(res.partition);
        rep.k_star = rep.partition.k;
    } else if (spec.algorithm == "smkm") {
        SmkmResult res = smkm(ds, *spec.k, derive_seed(spec.seed, hash_name("smkm")),
                              spec.max_cycles);
        rep.partition = std::move(res.result.partition);
        rep.k_star = rep.partition.k;
    } else if (spec.algorithm == "mckm") {
        MckmOutcome res = run_mckm(ds, spec);
        rep.partition = std::move(res.partition);
        rep.k_star = res.k_star;
        rep.s_star = res.sampling.s_star;
        rep.admm_iterations = res.merge.admm.iterations;
        rep.admm_converged = res.merge.admm.converged;
        rep.primal_residual = res.merge.admm.primal_residual;
        rep.dual_residual = res.merge.admm.dual_residual;
        rep.stages = res.stages;
    } else {  // cc
        CmConfig ccfg;
        ccfg.gamma = spec.gamma;
        ccfg.nu = spec.nu;
        ccfg.eta = spec.eta;
        ccfg.tol = spec.tol;
        ccfg.max_iter = spec.max_iter;
        ConvexClusterResult res = convex_cluster(ds, spec.effective_q(), spec.kappa, ccfg);
        rep.partition = std::move(res.partition);
        rep.k_star = res.k_star;
        rep.admm_iterations = res.admm.iterations;
        rep.admm_converged = res.admm.converged;
        rep.primal_residual = res.admm.primal_residual;
        rep.dual_residual = res.admm.dual_residual;
    }
    rep.runtime_seconds = seconds_since(t0);
    rep.stages.total = rep.runtime_seconds;

    rep.cost = pairwise_cost(ds, rep.partition);
    if (ds.has_labels()) {
        const Partition truth = ds.label_partition();
        rep.has_metrics = true;
        rep.f_star = f_star(truth, rep.partition);
        rep.nmi = nmi(truth, rep.partition);
        rep.ari = ari(truth, rep.partition);
        rep.cost_gap = std::abs(rep.cost - pairwise_cost(ds, truth));
    }
    return rep;
}

std::string report_to_json(const RunReport& rep, const std::string& assignments_path) {
    nlohmann::ordered_json j;
    j["dataset"] = rep.dataset;
    j["algorithm"] = rep.algorithm;
    nlohmann::ordered_json params;
    if (rep.spec.k) params["k"] = *rep.spec.k;
    params["rho"] = rep.spec.rho;
    params["gamma"] = rep.spec.gamma;
    params["q"] = rep.spec.effective_q();
    params["kappa"] = rep.spec.kappa;
    params["nu"] = rep.spec.nu;
    params["eta"] = rep.spec.eta;
    params["tol"] = rep.spec.tol;
    params["max_iter"] = rep.spec.max_iter;
    if (rep.spec.epsilon) params["epsilon"] = *rep.spec.epsilon;
    params["drop_last"] = rep.spec.drop_last;
    if (rep.algorithm == "smkm") params["max_cycles"] = rep.spec.max_cycles;
    j["params"] = params;
    j["seed"] = rep.seed;
    j["k_star"] = rep.k_star;
    nlohmann::ordered_json metrics;
    if (rep.has_metrics) {
        metrics["f_star"] = rep.f_star;
        metrics["nmi"] = rep.nmi;
        metrics["ari"] = rep.ari;
    } else {
        metrics["f_star"] = nullptr;
        metrics["nmi"] = nullptr;
        metrics["ari"] = nullptr;
    }
    metrics["cost"] = rep.cost;
    if (rep.has_metrics) metrics["cost_gap"] = rep.cost_gap;
    else metrics["cost_gap"] = nullptr;
    j["metrics"] = metrics;
    j["runtime_seconds"] = rep.runtime_seconds;
    if (rep.algorithm == "mckm") {
        j["s_star"] = rep.s_star;
        nlohmann::ordered_json stages;
        stages["sampling"] = rep.stages.sampling;
        stages["graph"] = rep.stages.graph;
        stages["merge"] = rep.stages.merge;
        j["stage_seconds"] = stages;
    }
    if (rep.algorithm == "mckm" || rep.algorithm == "cc") {
        nlohmann::ordered_json admm;
        admm["iterations"] = rep.admm_iterations;
        admm["converged"] = rep.admm_converged;
        admm["primal_residual"] = rep.primal_residual;
        admm["dual_residual"] = rep.dual_residual;
        j["admm"] = admm;
    }
    j["assignments_path"] = assignments_path.empty()
                                ? nlohmann::ordered_json(nullptr)
                                : nlohmann::ordered_json(assignments_path);
    return j.dump(2) + "\n";
}

}  // namespace mckm
