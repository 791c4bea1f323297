#include <cmath>
#include <set>

#include "doctest.h"
#include "mckm/kmeans.hpp"
#include "mckm/oracles.hpp"

using namespace mckm;

namespace {

Dataset blobs(std::uint64_t seed, int k = 3, std::size_t per = 40, double sigma = 0.05) {
    UnbalancedGaussiansSpec spec;
    for (int c = 0; c < k; ++c) {
        const double a = 2.0 * 3.14159265358979 * c / k;
        spec.components.push_back({per, sigma, {2.0 * std::cos(a), 2.0 * std::sin(a)}});
    }
    return generate_synthetic(spec, seed);
}

Dataset from_rows(std::vector<std::vector<double>> rows) {
    Dataset ds;
    ds.points = Matrix::from_rows(rows);
    return ds;
}

}  // namespace

TEST_CASE("assign breaks ties toward the lowest center index") {
    Dataset ds = from_rows({{0.5}, {0.0}, {1.0}});
    PrototypeSet protos;
    protos.centers = Matrix::from_rows({{0.0}, {1.0}});
    protos.provenance.resize(2);
    const Partition part = assign(ds, protos);
    CHECK(part.assignments == std::vector<int>{1, 1, 2});  // 0.5 is equidistant

    protos.centers = Matrix::from_rows({{1.0}, {1.0}});  // duplicate centers
    const Partition dup = assign(ds, protos);
    CHECK(dup.assignments == std::vector<int>{1, 1, 1});
}

TEST_CASE("update_centroids averages members and re-seeds empty clusters") {
    Dataset ds = from_rows({{0.0}, {2.0}, {10.0}, {14.0}});
    Partition part{{1, 1, 2, 2}, 2};
    auto protos = update_centroids(ds, part, 2);
    CHECK(protos.centers(0, 0) == 1.0);
    CHECK(protos.centers(1, 0) == 12.0);
    CHECK(protos.provenance[0].origin == CenterOrigin::CentroidUpdate);

    // ask for 3 clusters: id 3 is empty, gets the farthest sample (index 3,
    // distance 2 from its centroid; index 0 also at distance 1 ... sample 3 wins)
    Partition with_gap{{1, 1, 2, 2}, 3};
    auto repaired = update_centroids(ds, with_gap, 3);
    bool found = false;
    for (std::size_t c = 0; c < 3; ++c) {
        if (repaired.provenance[c].origin == CenterOrigin::SampledIndex) {
            found = true;
            CHECK(repaired.centers(c, 0) == ds.points(static_cast<std::size_t>(
                                                          repaired.provenance[c].sample_index), 0));
        }
    }
    CHECK(found);

    CHECK_THROWS_AS(update_centroids(ds, Partition{{1, 1, 2, 5}, 2}, 2), std::invalid_argument);
}

TEST_CASE("cost identity: kmeans_cost equals pairwise_cost at centroids") {
    auto rng = make_rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> kd(1, 5);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 5 + rep * 7, p = 1 + rep % 4;
        Dataset ds;
        ds.points = Matrix(n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) ds.points(i, j) = unit(rng);
        const int k = kd(rng);
        Partition part;
        part.k = k;
        part.assignments.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            part.assignments[i] = i < static_cast<std::size_t>(k)
                                      ? static_cast<int>(i) + 1
                                      : kd(rng) % k + 1;
        const auto centers = update_centroids(ds, part, k);
        const double direct = kmeans_cost(ds, centers, part);
        const double pairwise = pairwise_cost(ds, part);
        CHECK(std::abs(direct - pairwise) <= 1e-9 * std::max({1.0, direct, pairwise}));
    }
}

TEST_CASE("lloyd: monotone trace, stable stop, bitwise fixed point") {
    const Dataset ds = blobs(21);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        LloydResult res = lloyd(ds, kmeanspp_seed(ds, 3, seed), 1e-12, 500);
        for (std::size_t t = 1; t < res.cost_trace.size(); ++t)
            CHECK(res.cost_trace[t] <= res.cost_trace[t - 1] + 1e-12);
        REQUIRE(res.stop == LloydStop::StableAssignments);
        REQUIRE(res.partition.is_valid());

        LloydResult again = lloyd(ds, res.prototypes, 1e-12, 500);
        CHECK(again.prototypes.centers == res.prototypes.centers);
        CHECK(again.partition.assignments == res.partition.assignments);
        CHECK(again.cost == res.cost);
    }
}

TEST_CASE("lloyd validates its inputs") {
    const Dataset ds = blobs(1, 2, 5);
    CHECK_THROWS_AS(lloyd(ds, kmeanspp_seed(ds, 2, 0), 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(lloyd(ds, kmeanspp_seed(ds, 2, 0), 1e-6, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeanspp_seed(ds, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(kmeanspp_seed(ds, 11, 0), std::invalid_argument);
    CHECK_THROWS_AS(uniform_seed(ds, 11, 0), std::invalid_argument);
}

TEST_CASE("centroids are locally optimal for fixed assignments") {
    const Dataset ds = blobs(33, 4, 30);
    LloydResult res = lloyd(ds, kmeanspp_seed(ds, 4, 2), 1e-12, 500);
    const double base = kmeans_cost(ds, res.prototypes, res.partition);
    const double delta = 1e-3;
    for (std::size_t c = 0; c < res.prototypes.count(); ++c) {
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            for (double sign : {-1.0, 1.0}) {
                PrototypeSet bumped = res.prototypes;
                bumped.centers(c, j) += sign * delta;
                CHECK(kmeans_cost(ds, bumped, res.partition) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("d2_sample follows the weights and skips zeros") {
    auto rng = make_rng(5);
    const std::vector<double> w{0.0, 1.0, 0.0, 3.0};
    int counts[4] = {0, 0, 0, 0};
    for (int t = 0; t < 20000; ++t) counts[d2_sample(w, rng)]++;
    CHECK(counts[0] == 0);
    CHECK(counts[2] == 0);
    CHECK(std::abs(counts[1] / 20000.0 - 0.25) < 0.02);
    CHECK(std::abs(counts[3] / 20000.0 - 0.75) < 0.02);

    CHECK_THROWS_AS(d2_sample(std::vector<double>{0.0, 0.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(d2_sample(std::vector<double>{-1.0, 2.0}, rng), std::invalid_argument);
}

TEST_CASE("kmeans++ never picks a coincident point while distinct ones remain") {
    // three distinct values, each duplicated many times
    Dataset ds;
    ds.points = Matrix(30, 1);
    for (std::size_t i = 0; i < 30; ++i) ds.points(i, 0) = static_cast<double>(i % 3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto protos = kmeanspp_seed(ds, 3, seed);
        std::set<double> values;
        for (std::size_t c = 0; c < 3; ++c) values.insert(protos.centers(c, 0));
        CHECK(values == std::set<double>{0.0, 1.0, 2.0});
    }
}

TEST_CASE("kmeans++ falls back to uniform once distances vanish") {
    Dataset ds;
    ds.points = Matrix(6, 1);
    for (std::size_t i = 0; i < 6; ++i) ds.points(i, 0) = i < 3 ? 0.0 : 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto protos = kmeanspp_seed(ds, 4, seed);  // only 2 distinct values
        REQUIRE(protos.count() == 4);
        std::set<std::ptrdiff_t> picked;
        for (const auto& pr : protos.provenance) {
            CHECK(pr.origin == CenterOrigin::SampledIndex);
            picked.insert(pr.sample_index);
        }
        CHECK(picked.size() == 4);  // indices stay distinct even when values repeat
    }
}

TEST_CASE("uniform_seed picks k distinct indices") {
    const Dataset ds = blobs(3, 2, 10);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto protos = uniform_seed(ds, 5, seed);
        std::set<std::ptrdiff_t> idx;
        for (const auto& pr : protos.provenance) idx.insert(pr.sample_index);
        CHECK(idx.size() == 5);
    }
}

TEST_CASE("assignments agree with the exhaustive oracle") {
    const Dataset ds = blobs(17, 4, 25);
    const auto protos = kmeanspp_seed(ds, 4, 9);
    const Partition part = assign(ds, protos);
    CHECK(part.assignments == oracle::nearest_assign(ds.points, protos.centers));
    const auto d2 = nearest_sq_distances(ds, protos);
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const auto c = static_cast<std::size_t>(part.assignments[i] - 1);
        CHECK(d2[i] == doctest::Approx(squared_distance(ds.points.row(i), protos.centers.row(c)))
                           .epsilon(1e-12));
    }
}
