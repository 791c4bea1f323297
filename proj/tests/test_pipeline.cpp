#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "mckm/pipeline.hpp"

using namespace mckm;

namespace {

Dataset four_blobs(std::uint64_t seed) {
    UnbalancedGaussiansSpec spec;
    spec.components = {{40, 0.04, {0.0, 0.0}},
                       {40, 0.04, {1.0, 0.0}},
                       {40, 0.04, {0.0, 1.0}},
                       {40, 0.04, {1.0, 1.0}}};
    Dataset ds = generate_synthetic(spec, seed);
    ds.name = "four-blobs";
    return ds;
}

}  // namespace

TEST_CASE("spec validation") {
    AlgorithmSpec spec;
    spec.algorithm = "nope";
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec.algorithm = "kmeans";
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);  // k missing
    spec.k = 3;
    CHECK_NOTHROW(spec.validate());

    spec.algorithm = "smkm";
    spec.k = 1;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.algorithm = "mckm";
    CHECK_NOTHROW(spec.validate());
    spec.k = 4;  // estimators refuse a preset k
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    spec.algorithm = "mckm";
    spec.rho = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = {};
    spec.algorithm = "cc";
    spec.gamma = -0.5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = {};
    spec.algorithm = "mckm";
    spec.epsilon = 1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    CHECK(AlgorithmSpec{.algorithm = "mckm"}.effective_q() == 2);
    CHECK(AlgorithmSpec{.algorithm = "cc"}.effective_q() == 5);
    CHECK(AlgorithmSpec{.algorithm = "cc", .q = 3}.effective_q() == 3);
}

TEST_CASE("run dispatches the baselines and fills metrics") {
    const Dataset ds = four_blobs(6);
    for (const char* algo : {"kmeans", "kmeanspp", "smkm"}) {
        AlgorithmSpec spec;
        spec.algorithm = algo;
        spec.k = 4;
        spec.seed = 12;
        const RunReport rep = run(ds, spec);
        CHECK(rep.algorithm == algo);
        CHECK(rep.dataset == "four-blobs");
        CHECK(rep.k_star == 4);
        CHECK(rep.partition.size() == ds.n());
        CHECK(rep.partition.is_valid());
        REQUIRE(rep.has_metrics);
        CHECK(rep.f_star > 0.5);
        CHECK(rep.cost > 0.0);
        CHECK(rep.runtime_seconds >= 0.0);
    }
}

TEST_CASE("mckm end-to-end on separated blobs") {
    const Dataset ds = four_blobs(3);
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.gamma = 0.2;
    spec.seed = 5;
    const RunReport rep = run(ds, spec);
    CHECK(rep.k_star == 4);
    CHECK(rep.s_star >= 4);
    CHECK(rep.f_star > 0.95);
    CHECK(rep.ari > 0.95);
    CHECK(rep.admm_converged);
    CHECK(rep.partition.is_valid());
}

TEST_CASE("mckm outcome composes sample->prototype->cluster maps") {
    const Dataset ds = four_blobs(8);
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.gamma = 0.2;
    spec.seed = 2;
    const MckmOutcome out = run_mckm(ds, spec);
    REQUIRE(out.sampling.partition.size() == ds.n());
    REQUIRE(out.merge.proto_partition.size() == static_cast<std::size_t>(out.sampling.s_star));
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const int pid = out.sampling.partition.assignments[i];
        CHECK(out.partition.assignments[i] ==
              out.merge.proto_partition.assignments[static_cast<std::size_t>(pid - 1)]);
    }
    CHECK(out.k_star == out.merge.proto_partition.k);
}

TEST_CASE("tiny datasets clamp q instead of failing") {
    Dataset ds;
    ds.points = Matrix::from_rows({{0.0, 0.0}, {0.01, 0.0}, {5.0, 5.0}, {5.01, 5.0}});
    ds.name = "tiny";
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.q = 10;  // far larger than any prototype set here
    spec.gamma = 0.3;
    spec.seed = 1;
    const RunReport rep = run(ds, spec);
    CHECK(rep.partition.size() == 4);
    CHECK(rep.k_star >= 1);
}

TEST_CASE("single tight cluster short-circuits the merge stage") {
    Dataset ds;
    ds.points = Matrix(20, 2);
    for (std::size_t i = 0; i < 20; ++i) {
        ds.points(i, 0) = 3.0;
        ds.points(i, 1) = -1.0;
    }
    ds.name = "point-mass";
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.seed = 9;
    const RunReport rep = run(ds, spec);
    CHECK(rep.s_star == 1);
    CHECK(rep.k_star == 1);
    CHECK(rep.cost == 0.0);
    for (int a : rep.partition.assignments) CHECK(a == 1);
}

TEST_CASE("cc baseline runs through the dispatcher") {
    Dataset ds;
    ds.points = Matrix::from_rows({{0.0, 0.0}, {0.05, 0.0}, {0.0, 0.05},
                                   {2.0, 2.0}, {2.05, 2.0}, {2.0, 2.05}});
    ds.name = "cc-toy";
    AlgorithmSpec spec;
    spec.algorithm = "cc";
    spec.gamma = 5.0;
    const RunReport rep = run(ds, spec);
    CHECK(rep.k_star == 2);
    CHECK(rep.partition.is_valid());
    CHECK_FALSE(rep.has_metrics);  // no labels on this dataset
}

TEST_CASE("json report carries the exact schema") {
    const Dataset ds = four_blobs(11);
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.seed = 21;
    spec.gamma = 0.2;
    const RunReport rep = run(ds, spec);
    const std::string text = report_to_json(rep, "out/assignments.csv");
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("dataset") == "four-blobs");
    CHECK(j.at("algorithm") == "mckm");
    CHECK(j.at("seed") == 21);
    CHECK(j.at("k_star").is_number_integer());
    CHECK(j.at("params").at("gamma") == 0.2);
    CHECK(j.at("params").at("q") == 2);
    CHECK(j.at("metrics").at("f_star").is_number());
    CHECK(j.at("metrics").at("nmi").is_number());
    CHECK(j.at("metrics").at("ari").is_number());
    CHECK(j.at("metrics").at("cost").is_number());
    CHECK(j.at("metrics").at("cost_gap").is_number());
    CHECK(j.at("runtime_seconds").is_number());
    CHECK(j.at("assignments_path") == "out/assignments.csv");
    CHECK(j.at("s_star").is_number_integer());
    CHECK(j.at("admm").at("converged").is_boolean());

    // unlabeled data nulls the supervised metrics
    Dataset plain = ds;
    plain.labels.clear();
    const RunReport rep2 = run(plain, spec);
    const auto j2 = nlohmann::json::parse(report_to_json(rep2, ""));
    CHECK(j2.at("metrics").at("f_star").is_null());
    CHECK(j2.at("metrics").at("cost_gap").is_null());
    CHECK(j2.at("metrics").at("cost").is_number());
    CHECK(j2.at("assignments_path").is_null());
}

TEST_CASE("reports are byte-identical across runs up to timing fields") {
    const Dataset ds = four_blobs(13);
    AlgorithmSpec spec;
    spec.algorithm = "mckm";
    spec.seed = 33;
    spec.gamma = 0.15;
    auto scrub = [](const std::string& text) {
        auto j = nlohmann::json::parse(text);
        j.erase("runtime_seconds");
        j.erase("stage_seconds");
        return j.dump();
    };
    const std::string a = scrub(report_to_json(run(ds, spec), "x.csv"));
    const std::string b = scrub(report_to_json(run(ds, spec), "x.csv"));
    CHECK(a == b);
}
