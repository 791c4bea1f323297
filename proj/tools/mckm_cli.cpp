// mckm: dataset generation, single runs, seed sweeps, gamma paths, and the
// bundled reproduction suite.
//
// Exit codes: 0 ok, 1 reproduction failure, 2 usage error, 3 I/O error.
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mckm/acceptance.hpp"
#include "mckm/dataset.hpp"
#include "mckm/pipeline.hpp"

namespace {

using namespace mckm;

// relative outputs land in $MCKM_OUTPUT_DIR when it is set
std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("MCKM_OUTPUT_DIR"); dir && *dir)
        return std::filesystem::path(dir) / p;
    return p;
}

struct DataArgs {
    std::string file;
    std::string spec;
    std::uint64_t gen_seed = 0;
    bool normalize_features = false;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    auto* file = cmd->add_option("--data", args.file, "input dataset CSV");
    auto* spec = cmd->add_option("--spec", args.spec,
                                 "generator spec, e.g. gaussian-grid:3,5,50,0.01");
    file->excludes(spec);
    spec->excludes(file);
    cmd->add_option("--gen-seed", args.gen_seed, "generator seed when --spec is used")
        ->capture_default_str();
    cmd->add_flag("--normalize", args.normalize_features, "min-max scale features to [0,1]");
}

Dataset load_data(const DataArgs& args) {
    if (args.file.empty() && args.spec.empty())
        throw std::invalid_argument("one of --data or --spec is required");
    Dataset ds = args.file.empty()
                     ? generate_synthetic(parse_generator_spec(args.spec), args.gen_seed)
                     : load_csv(args.file);
    return args.normalize_features ? normalize(ds) : ds;
}

void add_algo_options(CLI::App* cmd, AlgorithmSpec& spec, std::optional<int>& k,
                      std::optional<int>& q, std::optional<double>& epsilon) {
    cmd->add_option("--algo", spec.algorithm, "kmeans | kmeanspp | smkm | cc | mckm")
        ->required();
    cmd->add_option("--k", k, "cluster count (kmeans/kmeanspp/smkm)");
    cmd->add_option("--rho", spec.rho, "sampling stop scale")->capture_default_str();
    cmd->add_option("--gamma", spec.gamma, "fusion strength")->capture_default_str();
    cmd->add_option("--q", q, "neighbors in the fusion graph (default 2, cc 5)");
    cmd->add_option("--kappa", spec.kappa, "fusion weight decay")->capture_default_str();
    cmd->add_option("--nu", spec.nu, "admm penalty")->capture_default_str();
    cmd->add_option("--eta", spec.eta, "merge threshold")->capture_default_str();
    cmd->add_option("--tol", spec.tol, "solver tolerance")->capture_default_str();
    cmd->add_option("--max-iter", spec.max_iter, "admm iteration cap")->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "sampling stop threshold, overrides --rho");
    cmd->add_flag("--drop-last", spec.drop_last, "drop the stop-triggering prototype");
    cmd->add_option("--max-cycles", spec.max_cycles, "smkm split/merge cycle cap")
        ->capture_default_str();
    cmd->add_option("--seed", spec.seed, "run seed")->capture_default_str();
}

std::string stats_line(const char* name, const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-8s %10.4f +/- %.4f", name, mean, std::sqrt(var));
    return buf;
}

std::vector<double> parse_gamma_grid(const std::string& text) {
    std::vector<double> out;
    const auto first = text.find(':');
    if (first != std::string::npos) {
        const auto second = text.find(':', first + 1);
        if (second == std::string::npos)
            throw std::invalid_argument("--gammas wants start:step:stop or a comma list");
        const double start = std::stod(text.substr(0, first));
        const double step = std::stod(text.substr(first + 1, second - first - 1));
        const double stop = std::stod(text.substr(second + 1));
        if (step <= 0 || stop < start)
            throw std::invalid_argument("--gammas grid must ascend");
        for (double g = start; g <= stop + 1e-12; g += step) out.push_back(g);
    } else {
        std::string cur;
        for (char c : text + ",") {
            if (c == ',') {
                if (!cur.empty()) out.push_back(std::stod(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        for (std::size_t i = 1; i < out.size(); ++i)
            if (out[i] < out[i - 1]) throw std::invalid_argument("--gammas must ascend");
    }
    if (out.empty()) throw std::invalid_argument("--gammas is empty");
    return out;
}

int cmd_generate(const std::string& spec_text, std::uint64_t seed, const std::string& out) {
    const Dataset ds = generate_synthetic(parse_generator_spec(spec_text), seed);
    const auto path = resolve_out(out);
    save_csv(path, ds);
    std::printf("wrote %zu rows (%zu features, %d clusters) to %s\n", ds.n(), ds.dim(),
                ds.label_partition().k, path.string().c_str());
    return 0;
}

int cmd_run(const DataArgs& data, const AlgorithmSpec& spec, const std::string& out,
            const std::string& assignments) {
    const Dataset ds = load_data(data);
    const RunReport rep = run(ds, spec);
    std::string assignments_path;
    if (!assignments.empty()) {
        const auto path = resolve_out(assignments);
        save_assignments_csv(path, rep.partition);
        assignments_path = path.string();
    }
    const std::string json = report_to_json(rep, assignments_path);
    if (out.empty()) {
        std::printf("%s\n", json.c_str());
    } else {
        const auto path = resolve_out(out);
        write_text_atomic(path, json + "\n");
        std::printf("k*=%d, report written to %s\n", rep.k_star, path.string().c_str());
    }
    return 0;
}

int cmd_sweep(const DataArgs& data, const AlgorithmSpec& base, int trials, unsigned threads,
              const std::string& out) {
    if (trials < 1) throw std::invalid_argument("--trials must be >= 1");
    const Dataset ds = load_data(data);

    std::vector<RunReport> reports(static_cast<std::size_t>(trials));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= reports.size()) return;
            try {
                AlgorithmSpec spec = base;
                spec.seed = derive_seed(base.seed, t + 1);
                reports[t] = run(ds, spec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    const unsigned workers =
        std::max(1u, std::min(threads, static_cast<unsigned>(trials)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    std::printf("%s on %s, %d trials, base seed %llu\n", base.algorithm.c_str(),
                ds.name.c_str(), trials, static_cast<unsigned long long>(base.seed));
    auto column = [&](auto&& get) {
        std::vector<double> xs;
        for (const auto& r : reports) xs.push_back(get(r));
        return xs;
    };
    std::printf("%s\n", stats_line("k*", column([](const RunReport& r) {
                                       return static_cast<double>(r.k_star);
                                   })).c_str());
    if (reports.front().has_metrics) {
        std::printf("%s\n", stats_line("F*", column([](const auto& r) { return r.f_star; })).c_str());
        std::printf("%s\n", stats_line("NMI", column([](const auto& r) { return r.nmi; })).c_str());
        std::printf("%s\n", stats_line("ARI", column([](const auto& r) { return r.ari; })).c_str());
        std::printf("%s\n", stats_line("|J-J*|", column([](const auto& r) { return r.cost_gap; })).c_str());
    }
    std::printf("%s\n", stats_line("J", column([](const auto& r) { return r.cost; })).c_str());
    std::printf("%s\n", stats_line("time", column([](const auto& r) {
                                       return r.runtime_seconds;
                                   })).c_str());

    if (!out.empty()) {
        std::string csv =
            "trial,seed,k_star,s_star,f_star,nmi,ari,cost,cost_gap,runtime_seconds\n";
        for (std::size_t t = 0; t < reports.size(); ++t) {
            const auto& r = reports[t];
            csv += std::to_string(t + 1) + ',' + std::to_string(r.seed) + ',' +
                   std::to_string(r.k_star) + ',' + std::to_string(r.s_star) + ',' +
                   format_double(r.f_star) + ',' + format_double(r.nmi) + ',' +
                   format_double(r.ari) + ',' + format_double(r.cost) + ',' +
                   format_double(r.cost_gap) + ',' + format_double(r.runtime_seconds) + '\n';
        }
        const auto path = resolve_out(out);
        write_text_atomic(path, csv);
        std::printf("per-trial table written to %s\n", path.string().c_str());
    }
    return 0;
}

int cmd_gamma_path(const DataArgs& data, AlgorithmSpec spec, const std::string& grid_text,
                   const std::string& out) {
    const Dataset ds = load_data(data);
    const std::vector<double> gammas = parse_gamma_grid(grid_text);

    CmConfig cfg;
    cfg.nu = spec.nu;
    cfg.eta = spec.eta;
    cfg.tol = spec.tol;
    cfg.max_iter = spec.max_iter;

    std::vector<FusionPoint> path;
    if (spec.algorithm == "cc") {
        const int q = std::min(spec.effective_q(), static_cast<int>(ds.n()) - 1);
        const PairGraph g = build_pair_graph(ds.points, q, spec.kappa);
        path = gamma_path(ds.points, g, cfg, gammas);
    } else if (spec.algorithm == "mckm") {
        MpsConfig mcfg;
        mcfg.rho = spec.rho;
        mcfg.epsilon_override = spec.epsilon;
        mcfg.drop_last = spec.drop_last;
        mcfg.seed = derive_seed(spec.seed, hash_name("mps"));
        const MpsResult m = mps(ds, mcfg);
        if (m.s_star < 2) {
            path.reserve(gammas.size());
            for (double g : gammas) path.push_back({g, m.s_star});
        } else {
            const int q = std::min(spec.effective_q(), m.s_star - 1);
            const PairGraph g = build_pair_graph(m.prototypes.centers, q, spec.kappa);
            path = gamma_path(m.prototypes.centers, g, cfg, gammas);
        }
    } else {
        throw std::invalid_argument("gamma-path supports --algo mckm or cc");
    }

    std::string csv = "gamma,k_star\n";
    for (const auto& pt : path)
        csv += format_double(pt.gamma) + ',' + std::to_string(pt.k_star) + '\n';
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        const auto path_out = resolve_out(out);
        write_text_atomic(path_out, csv);
        std::printf("%zu path points written to %s\n", path.size(), path_out.string().c_str());
    }
    return 0;
}

int cmd_reproduce(const std::string& data_dir) {
    AcceptanceOptions opts;
    opts.data_dir = data_dir;
    opts.log = [](const std::string& line) {
        std::puts(line.c_str());
        std::fflush(stdout);
    };
    std::puts("criterion results:");
    const auto results = run_acceptance(opts);
    int passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::printf("%d/%zu criteria passed\n", passed, results.size());
    return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCKM clustering toolkit"};
    app.require_subcommand(1);
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "cap on worker threads")->capture_default_str();

    auto* gen = app.add_subcommand("generate", "write a synthetic dataset CSV");
    gen->fallthrough();
    std::string gen_spec, gen_out;
    std::uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "generator spec, e.g. gaussian-grid:3,5,50,0.01")
        ->required();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("-o,--output", gen_out, "output CSV path")->required();

    auto* runc = app.add_subcommand("run", "run one algorithm and emit a JSON report");
    runc->fallthrough();
    DataArgs run_data;
    AlgorithmSpec run_spec;
    std::optional<int> run_k, run_q;
    std::optional<double> run_eps;
    std::string run_out, run_assignments;
    add_data_options(runc, run_data);
    add_algo_options(runc, run_spec, run_k, run_q, run_eps);
    runc->add_option("-o,--output", run_out, "report path (stdout when omitted)");
    runc->add_option("--assignments", run_assignments, "also write per-sample assignments CSV");

    auto* sweep = app.add_subcommand("sweep", "repeat a run over derived seeds, mean +/- std");
    sweep->fallthrough();
    DataArgs sweep_data;
    AlgorithmSpec sweep_spec;
    std::optional<int> sweep_k, sweep_q;
    std::optional<double> sweep_eps;
    std::string sweep_out;
    int trials = 20;
    add_data_options(sweep, sweep_data);
    add_algo_options(sweep, sweep_spec, sweep_k, sweep_q, sweep_eps);
    sweep->add_option("--trials", trials, "number of trials")->capture_default_str();
    sweep->add_option("-o,--output", sweep_out, "per-trial CSV path");

    auto* gpath = app.add_subcommand("gamma-path", "emit the (gamma, k*) fusion trace as CSV");
    gpath->fallthrough();
    DataArgs gpath_data;
    AlgorithmSpec gpath_spec;
    gpath_spec.algorithm = "mckm";
    std::optional<int> gpath_q;
    std::optional<double> gpath_eps;
    std::string gpath_grid = "0.01:0.01:0.5", gpath_out;
    add_data_options(gpath, gpath_data);
    gpath->add_option("--algo", gpath_spec.algorithm, "mckm | cc")->capture_default_str();
    gpath->add_option("--rho", gpath_spec.rho, "sampling stop scale")->capture_default_str();
    gpath->add_option("--q", gpath_q, "neighbors in the fusion graph");
    gpath->add_option("--kappa", gpath_spec.kappa, "fusion weight decay")->capture_default_str();
    gpath->add_option("--nu", gpath_spec.nu, "admm penalty")->capture_default_str();
    gpath->add_option("--eta", gpath_spec.eta, "merge threshold")->capture_default_str();
    gpath->add_option("--tol", gpath_spec.tol, "solver tolerance")->capture_default_str();
    gpath->add_option("--max-iter", gpath_spec.max_iter, "admm iteration cap")
        ->capture_default_str();
    gpath->add_option("--epsilon", gpath_eps, "sampling stop threshold, overrides --rho");
    gpath->add_option("--seed", gpath_spec.seed, "run seed")->capture_default_str();
    gpath->add_option("--gammas", gpath_grid, "start:step:stop or comma list")
        ->capture_default_str();
    gpath->add_option("-o,--output", gpath_out, "output CSV path (stdout when omitted)");

    auto* rep = app.add_subcommand("reproduce", "run the bundled criteria suite");
    rep->fallthrough();
    std::string data_dir =
#ifdef MCKM_DATA_DIR
        MCKM_DATA_DIR;
#else
        "data";
#endif
    rep->add_option("--data-dir", data_dir, "directory holding iris.csv")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_spec, gen_seed, gen_out);
        if (runc->parsed()) {
            run_spec.k = run_k;
            run_spec.q = run_q;
            run_spec.epsilon = run_eps;
            run_spec.validate();
            return cmd_run(run_data, run_spec, run_out, run_assignments);
        }
        if (sweep->parsed()) {
            sweep_spec.k = sweep_k;
            sweep_spec.q = sweep_q;
            sweep_spec.epsilon = sweep_eps;
            sweep_spec.validate();
            return cmd_sweep(sweep_data, sweep_spec, trials, threads, sweep_out);
        }
        if (gpath->parsed()) {
            gpath_spec.q = gpath_q;
            gpath_spec.epsilon = gpath_eps;
            return cmd_gamma_path(gpath_data, gpath_spec, gpath_grid, gpath_out);
        }
        if (rep->parsed()) return cmd_reproduce(data_dir);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
