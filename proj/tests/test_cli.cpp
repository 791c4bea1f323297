#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mckm/dataset.hpp"

using namespace mckm;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult sh(const std::string& cmd) {
    CmdResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[512];
    while (std::fgets(buf, sizeof(buf), pipe)) res.out += buf;
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

std::string cli() { return std::string(MCKM_CLI_PATH); }

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mckm_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_CASE("generate writes a labeled csv") {
    TempDir tmp;
    const auto out = tmp.path / "d5.csv";
    const auto res =
        sh(cli() + " generate --spec gaussian-grid:3,5,50,0.01 --seed 7 -o " + out.string());
    CHECK(res.status == 0);
    const Dataset ds = load_csv(out);
    CHECK(ds.n() == 750);
    CHECK(ds.dim() == 2);
    CHECK(ds.label_partition().k == 15);
}

TEST_CASE("output dir env var is the default base for relative paths") {
    TempDir tmp;
    const auto res = sh("MCKM_OUTPUT_DIR=" + tmp.path.string() + " " + cli() +
                        " generate --spec two-moons:n=40 --seed 1 -o moons.csv");
    CHECK(res.status == 0);
    CHECK(fs::exists(tmp.path / "moons.csv"));
}

TEST_CASE("run emits a json report and assignments") {
    TempDir tmp;
    const auto data = tmp.path / "blobs.csv";
    REQUIRE(sh(cli() + " generate --spec gaussian-grid:2,2,40,0.02 --seed 3 -o " + data.string())
                .status == 0);

    const auto report = tmp.path / "report.json";
    const auto labels = tmp.path / "labels.csv";
    const auto res = sh(cli() + " run --algo mckm --gamma 0.1 --q 1 --seed 5 --data " +
                        data.string() + " -o " + report.string() + " --assignments " +
                        labels.string());
    CHECK(res.status == 0);
    REQUIRE(fs::exists(report));
    std::ifstream in(report);
    std::string json((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(json.find("\"k_star\": 4") != std::string::npos);
    CHECK(json.find("\"algorithm\": \"mckm\"") != std::string::npos);
    const Partition part = load_assignments_csv(labels);
    CHECK(part.size() == 160);
    CHECK(part.k == 4);
}

TEST_CASE("run without an output prints the report") {
    const auto res = sh(cli() +
                        " run --algo kmeans --k 4 --seed 2 --spec gaussian-grid:2,2,30,0.02");
    CHECK(res.status == 0);
    CHECK(res.out.find("\"ari\"") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(sh(cli() + " run --algo who --spec two-moons:n=30").status == 2);
    CHECK(sh(cli() + " run --algo kmeans --spec two-moons:n=30").status == 2);  // k missing
    CHECK(sh(cli() + " frobnicate").status == 2);
    CHECK(sh(cli() + " generate --spec rings:n=5 -o x.csv").status == 2);
    CHECK(sh(cli() + " run --algo mckm").status == 2);  // no data source
}

TEST_CASE("io errors exit 3") {
    CHECK(sh(cli() + " run --algo mckm --data /nonexistent/nope.csv").status == 3);
    TempDir tmp;
    const auto res = sh(cli() + " generate --spec two-moons:n=30 -o " +
                        (tmp.path / "no_dir" / "x.csv").string());
    CHECK(res.status == 3);
}

TEST_CASE("gamma-path emits an ascending fusion trace") {
    const auto res = sh(cli() + " gamma-path --spec gaussian-grid:2,2,40,0.02 --seed 4 --q 7" +
                        " --gammas 0.01:0.25:2.01");
    CHECK(res.status == 0);
    REQUIRE(res.out.rfind("gamma,k_star\n", 0) == 0);
    // k* must be non-increasing down the path
    int prev_k = 1 << 20;
    bool saw_row = false;
    std::istringstream lines(res.out.substr(res.out.find('\n') + 1));
    std::string line;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        const int k = std::stoi(line.substr(comma + 1));
        CHECK(k <= prev_k);
        prev_k = k;
        saw_row = true;
    }
    CHECK(saw_row);
    CHECK(prev_k == 1);  // fully fused by the end of the grid
}

TEST_CASE("gamma-path floor is the fusion graph component count") {
    // q=1 keeps the four blobs in separate components, so k* cannot drop below 4
    const auto res = sh(cli() + " gamma-path --spec gaussian-grid:2,2,40,0.02 --seed 4 --q 1" +
                        " --gammas 0.4");
    CHECK(res.status == 0);
    CHECK(res.out.find("0.4,4") != std::string::npos);
}

TEST_CASE("sweep prints mean and spread per metric") {
    TempDir tmp;
    const auto out = tmp.path / "trials.csv";
    // --threads is global but may trail the subcommand
    const auto res = sh(cli() + " sweep --algo kmeanspp --k 4 --trials 5 --seed 9 --threads 2" +
                        " --spec gaussian-grid:2,2,30,0.02 -o " + out.string());
    CHECK(res.status == 0);
    CHECK(res.out.find("k*") != std::string::npos);
    CHECK(res.out.find("+/-") != std::string::npos);
    CHECK(res.out.find("ARI") != std::string::npos);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "trial,seed,k_star,s_star,f_star,nmi,ari,cost,cost_gap,runtime_seconds");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 5);
}
