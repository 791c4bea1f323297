#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mckm/dataset.hpp"

using namespace mckm;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "mckm_dataset_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("partition validity") {
    Partition p{{1, 2, 1, 3}, 3};
    CHECK(p.is_valid());
    CHECK(p.cluster_sizes() == std::vector<std::size_t>{2, 1, 1});
    CHECK_FALSE(Partition{{1, 2}, 3}.is_valid());  // id 3 unused
    CHECK_FALSE(Partition{{0, 1}, 1}.is_valid());  // 0 is out of range
    CHECK_FALSE(Partition{{1, 4}, 3}.is_valid());
    CHECK_FALSE(Partition{{}, 0}.is_valid());
}

TEST_CASE("normalize maps each feature to [0,1] and kills constants") {
    Dataset ds;
    ds.points = Matrix::from_rows({{0.0, 5.0, 7.0}, {10.0, 5.0, 3.0}, {5.0, 5.0, 5.0}});
    const Dataset out = normalize(ds);
    CHECK(out.points(0, 0) == 0.0);
    CHECK(out.points(1, 0) == 1.0);
    CHECK(out.points(2, 0) == 0.5);
    for (int i = 0; i < 3; ++i) CHECK(out.points(static_cast<std::size_t>(i), 1) == 0.0);
    CHECK(out.points(0, 2) == 1.0);
    CHECK(out.points(1, 2) == 0.0);
    CHECK(out.points(2, 2) == 0.5);
}

TEST_CASE("format_double round-trips exactly") {
    auto rng = make_rng(11);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        double v = u(rng);
        if (i % 3 == 0) v = std::ldexp(v, -30);  // tiny magnitudes too
        const std::string s = format_double(v);
        double back = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc());
        REQUIRE(ptr == s.data() + s.size());
        REQUIRE(back == v);
    }
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("csv save/load round-trips bitwise") {
    Dataset ds;
    ds.points = Matrix::from_rows({{0.1 + 0.2, -3.5e-17}, {1.0 / 3.0, 2.0}, {-0.0, 123456.789}});
    ds.labels = {2, 1, 2};
    ds.name = "roundtrip";
    const auto path = temp_dir() / "roundtrip.csv";
    save_csv(path, ds);
    const Dataset back = load_csv(path);
    REQUIRE(back.n() == ds.n());
    REQUIRE(back.dim() == ds.dim());
    CHECK(back.points == ds.points);
    CHECK(back.labels == ds.labels);
    CHECK(back.name == "roundtrip");

    SUBCASE("without labels") {
        ds.labels.clear();
        save_csv(path, ds);
        const Dataset plain = load_csv(path);
        CHECK_FALSE(plain.has_labels());
        CHECK(plain.points == ds.points);
    }
}

TEST_CASE("csv loader rejects malformed input") {
    const auto dir = temp_dir();
    CHECK_THROWS_AS(load_csv(dir / "missing.csv"), std::runtime_error);

    auto write = [&](const char* name, const char* text) {
        std::ofstream out(dir / name);
        out << text;
        return dir / name;
    };
    CHECK_THROWS_AS(load_csv(write("ragged.csv", "x1,x2\n1,2\n3\n")), std::runtime_error);
    CHECK_THROWS_AS(load_csv(write("badnum.csv", "x1\nabc\n")), std::runtime_error);
    CHECK_THROWS_AS(load_csv(write("badlabel.csv", "x1,label\n1,0\n")), std::runtime_error);
    CHECK_THROWS_AS(load_csv(write("fraclabel.csv", "x1,label\n1,1.5\n")), std::runtime_error);
    CHECK_THROWS_AS(load_csv(write("empty.csv", "x1,label\n")), std::runtime_error);
}

TEST_CASE("assignments csv round-trip") {
    const auto path = temp_dir() / "assign.csv";
    Partition part{{1, 3, 2, 3}, 3};
    save_assignments_csv(path, part);
    const Partition back = load_assignments_csv(path);
    CHECK(back.assignments == part.assignments);
    CHECK(back.k == 3);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,cluster");
}

TEST_CASE("generator spec parsing") {
    const auto tm = std::get<TwoMoonsSpec>(parse_generator_spec("two-moons:n=300,noise=0.1"));
    CHECK(tm.n == 300);
    CHECK(tm.noise == 0.1);

    const auto gg =
        std::get<GaussianGridSpec>(parse_generator_spec("gaussian-grid:rows=3,cols=5,per=50,sigma=0.01"));
    CHECK(gg.rows == 3);
    CHECK(gg.cols == 5);
    CHECK(gg.per_cluster == 50);
    CHECK(gg.sigma == 0.01);

    const auto ub =
        std::get<UnbalancedGaussiansSpec>(parse_generator_spec("unbalanced:counts=500/100/30,sigma=0.2"));
    REQUIRE(ub.components.size() == 3);
    CHECK(ub.components[0].count == 500);
    CHECK(ub.components[2].count == 30);
    CHECK(ub.components[1].sigma == 0.2);
    CHECK(ub.components[0].center.size() == 2);

    CHECK(std::get<TwoMoonsSpec>(parse_generator_spec("two-moons")).n == 200);  // defaults

    // bare values fill the documented order, mixing with key=value is fine
    const auto pg = std::get<GaussianGridSpec>(parse_generator_spec("gaussian-grid:3,5,50,0.01"));
    CHECK(pg.rows == 3);
    CHECK(pg.cols == 5);
    CHECK(pg.per_cluster == 50);
    CHECK(pg.sigma == 0.01);
    const auto pm = std::get<TwoMoonsSpec>(parse_generator_spec("two-moons:150,noise=0.2"));
    CHECK(pm.n == 150);
    CHECK(pm.noise == 0.2);
    const auto pu = std::get<UnbalancedGaussiansSpec>(parse_generator_spec("unbalanced:40/10,0.3"));
    REQUIRE(pu.components.size() == 2);
    CHECK(pu.components[1].count == 10);
    CHECK(pu.components[0].sigma == 0.3);
    CHECK_THROWS_AS(parse_generator_spec("gaussian-grid:3,5,50,0.01,9"), std::invalid_argument);

    CHECK_THROWS_AS(parse_generator_spec("rings:n=10"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("two-moons:n=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("two-moons:noise=-1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("two-moons:bogus=3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("two-moons:n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("gaussian-grid:rows=2.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_generator_spec("unbalanced:counts="), std::invalid_argument);
}

TEST_CASE("two moons generator") {
    const auto spec = parse_generator_spec("two-moons:n=201,noise=0.02");
    const Dataset ds = generate_synthetic(spec, 7);
    REQUIRE(ds.n() == 201);
    REQUIRE(ds.dim() == 2);
    REQUIRE(ds.has_labels());
    std::size_t first = 0, second = 0;
    for (int l : ds.labels) (l == 1 ? first : second)++;
    CHECK(first == 100);
    CHECK(second == 101);
    CHECK(ds.name == "two-moons-201");

    const Dataset again = generate_synthetic(spec, 7);
    CHECK(again.points == ds.points);
    const Dataset other = generate_synthetic(spec, 8);
    CHECK_FALSE(other.points == ds.points);
}

TEST_CASE("gaussian grid generator puts tight blobs on a lattice") {
    const auto spec = parse_generator_spec("gaussian-grid:rows=2,cols=3,per=40,sigma=0.005");
    const Dataset ds = generate_synthetic(spec, 3);
    REQUIRE(ds.n() == 240);
    REQUIRE(ds.dim() == 2);
    int max_label = 0;
    for (int l : ds.labels) max_label = std::max(max_label, l);
    CHECK(max_label == 6);
    // every sample sits near its lattice center
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const int l = ds.labels[i] - 1;
        const double cx = (l % 3 + 0.5) / 3.0;
        const double cy = (l / 3 + 0.5) / 2.0;
        CHECK(std::abs(ds.points(i, 0) - cx) < 0.05);
        CHECK(std::abs(ds.points(i, 1) - cy) < 0.05);
    }
}

TEST_CASE("unbalanced generator respects counts") {
    const Dataset ds = generate_synthetic(parse_generator_spec("unbalanced:counts=50/10/5,sigma=0.01"), 5);
    REQUIRE(ds.n() == 65);
    auto part = ds.label_partition();
    CHECK(part.k == 3);
    CHECK(part.cluster_sizes() == std::vector<std::size_t>{50, 10, 5});
}

TEST_CASE("atomic write leaves no temp file behind") {
    const auto path = temp_dir() / "atomic.txt";
    write_text_atomic(path, "hello\n");
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "hello");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}
