#include <doctest.h>

#include <cmath>

#include "test_support.hpp"

using namespace mel;
using test_support::constant_set;

TEST_CASE("sampled function invariants") {
    CHECK_THROWS_AS(SampledFunction({0.0, 0.5}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({0.5, 0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({0.5, 0.2}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({-0.1, 0.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({0.0, 1.5}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SampledFunction({0.0, 1.0}, {1.0, std::nan("")}), std::invalid_argument);
    CHECK_NOTHROW(SampledFunction({0.25}, {3.0}));
}

TEST_CASE("supremum distance of constant shift") {
    const auto grid = uniform_grid(7);
    for (double c : {0.25, 1.0, 4.5}) {
        const auto f = constant_function(0.0, grid);
        const auto g = constant_function(c, grid);
        CHECK(distance(f, g, MetricSpec::supremum()) == c);
    }
}

TEST_CASE("L1 distance of constant integrand is exact") {
    const auto grid = uniform_grid(101);
    const auto f = constant_function(0.0, grid);
    const auto g = constant_function(1.0, grid);
    CHECK(distance(f, g, MetricSpec::lp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("L2 distance of ramp vs zero matches the closed form") {
    // integral of t^2 over [0,1] is 1/3, so the L2 distance is 1/sqrt(3)
    const auto grid = uniform_grid(1001);
    std::vector<double> ramp(grid);
    const SampledFunction f(grid, ramp);
    const auto g = constant_function(0.0, grid);
    CHECK(distance(f, g, MetricSpec::lp(2.0)) ==
          doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("distance errors") {
    const auto f = constant_function(0.0, uniform_grid(5));
    const auto g = constant_function(0.0, uniform_grid(6));
    CHECK_THROWS_AS(distance(f, g, MetricSpec::supremum()), std::invalid_argument);
    const auto single = constant_function(1.0, uniform_grid(1));
    CHECK_THROWS_AS(distance(single, single, MetricSpec::lp(1.0)), std::invalid_argument);
    CHECK_NOTHROW(distance(single, single, MetricSpec::supremum()));
    CHECK_THROWS_AS(MetricSpec::lp(0.5), std::invalid_argument);
}

TEST_CASE("distance matrix basics") {
    SUBCASE("single point") {
        auto ps = constant_set({2.0}, MetricSpec::supremum());
        CHECK(ps.distance_matrix() == std::vector<double>{0.0});
    }
    SUBCASE("two points") {
        auto ps = constant_set({0.0, 1.5}, MetricSpec::supremum());
        CHECK(ps.distance_matrix() == std::vector<double>{0.0, 1.5, 1.5, 0.0});
    }
    SUBCASE("three collinear constants, triangle tight in the middle") {
        auto ps = constant_set({0.0, 1.0, 3.0}, MetricSpec::supremum());
        CHECK(ps.dist(0, 1) == 1.0);
        CHECK(ps.dist(1, 2) == 2.0);
        CHECK(ps.dist(0, 2) == 3.0);
        CHECK(ps.dist(0, 2) == ps.dist(0, 1) + ps.dist(1, 2));
    }
}

TEST_CASE("cached distance matrices are symmetric with a zero diagonal") {
    Rng rng(909);
    for (int rep = 0; rep < 10; ++rep) {
        auto ps = test_support::random_curve_set(3 + rng.below(12),
                                                 test_support::random_metric(rng), rng);
        const auto& m = ps.distance_matrix();
        CHECK(ps.has_distance_matrix());
        const std::size_t n = ps.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(m[i * n + i] == 0.0);
            for (std::size_t j = 0; j < n; ++j) CHECK(m[i * n + j] == m[j * n + i]);
        }
    }
}

TEST_CASE("metric axioms on random curves") {
    Rng rng(101);
    for (int rep = 0; rep < 40; ++rep) {
        const auto metric = test_support::random_metric(rng);
        auto ps = test_support::random_curve_set(3, metric, rng);
        const auto& f = ps.point(0);
        const auto& g = ps.point(1);
        const auto& h = ps.point(2);
        CHECK(distance(f, g, metric) == distance(g, f, metric));
        CHECK(distance(f, f, metric) == 0.0);
        CHECK(distance(f, h, metric) <= distance(f, g, metric) + distance(g, h, metric) + 1e-12);
        CHECK(distance(f, g, metric) >= 0.0);
    }
}

TEST_CASE("supremum distance is invariant under breakpoint refinement") {
    Rng rng(7);
    const auto coarse = uniform_grid(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> va(5), vb(5);
        for (auto* v : {&va, &vb})
            for (double& x : *v) x = rng.uniform(-1.0, 1.0);
        // refine by inserting interval midpoints with linearly interpolated values
        std::vector<double> fine_grid, fa, fb;
        for (std::size_t i = 0; i < coarse.size(); ++i) {
            fine_grid.push_back(coarse[i]);
            fa.push_back(va[i]);
            fb.push_back(vb[i]);
            if (i + 1 < coarse.size()) {
                fine_grid.push_back(0.5 * (coarse[i] + coarse[i + 1]));
                fa.push_back(0.5 * (va[i] + va[i + 1]));
                fb.push_back(0.5 * (vb[i] + vb[i + 1]));
            }
        }
        const double d_coarse = distance(SampledFunction(coarse, va), SampledFunction(coarse, vb),
                                         MetricSpec::supremum());
        const double d_fine = distance(SampledFunction(fine_grid, fa),
                                       SampledFunction(fine_grid, fb), MetricSpec::supremum());
        CHECK(d_fine == d_coarse);
    }
}

TEST_CASE("L1 distance of constant pairs is grid independent") {
    Rng rng(11);
    for (std::size_t m : {2u, 11u, 101u}) {
        const auto grid = uniform_grid(m);
        const double c = rng.uniform(0.1, 3.0);
        const double d = distance(constant_function(0.5, grid), constant_function(0.5 + c, grid),
                                  MetricSpec::lp(1.0));
        CHECK(d == doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("point sets refuse mixed grids") {
    std::vector<SampledFunction> pts{constant_function(0.0, uniform_grid(4)),
                                     constant_function(1.0, uniform_grid(5))};
    CHECK_THROWS_AS(PointSet(std::move(pts), MetricSpec::supremum()), std::invalid_argument);
}
