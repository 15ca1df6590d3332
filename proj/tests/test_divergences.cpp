#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

using namespace mel;

namespace {

DiscreteMeasure make(std::vector<double> w) {
    std::vector<std::size_t> s(w.size());
    std::iota(s.begin(), s.end(), std::size_t{0});
    return DiscreteMeasure(std::move(s), std::move(w));
}

}  // namespace

TEST_CASE("discrete measure invariants") {
    CHECK_THROWS_AS(make({0.5, 0.4}), std::invalid_argument);           // does not sum to one
    CHECK_THROWS_AS(make({1.5, -0.5}), std::invalid_argument);          // negative weight
    CHECK_THROWS_AS(DiscreteMeasure({0, 0}, {0.5, 0.5}), std::invalid_argument);  // duplicate
    const auto m = DiscreteMeasure({3, 1}, {0.25, 0.75});
    CHECK(m.support() == std::vector<std::size_t>{1, 3});  // canonical order
    CHECK(m.weight_at(1) == 0.75);
    CHECK(m.weight_at(2) == 0.0);
    CHECK(m.contains(3));
}

TEST_CASE("total variation examples") {
    CHECK(tv(make({0.5, 0.5}), make({0.5, 0.5})) == 0.0);
    CHECK(tv(make({0.5, 0.5}), make({1.0, 0.0})) == doctest::Approx(0.5));
    CHECK(tv(make({0.2, 0.3, 0.5}), make({0.5, 0.3, 0.2})) == doctest::Approx(0.3));
}

TEST_CASE("squared Hellinger examples") {
    CHECK(hellinger_sq(make({0.3, 0.7}), make({0.3, 0.7})) == 0.0);
    // disjoint supports
    CHECK(hellinger_sq(DiscreteMeasure({0}, {1.0}), DiscreteMeasure({1}, {1.0})) ==
          doctest::Approx(2.0));
    const double expected = (1.0 - std::sqrt(0.5)) * (1.0 - std::sqrt(0.5)) + 0.5;
    CHECK(hellinger_sq(make({1.0, 0.0}), make({0.5, 0.5})) == doctest::Approx(expected));
}

TEST_CASE("Kullback-Leibler examples") {
    CHECK(kl(make({0.4, 0.6}), make({0.4, 0.6})) == 0.0);
    CHECK(kl(make({1.0, 0.0}), make({0.0, 1.0})) == std::numeric_limits<double>::infinity());
    const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
    CHECK(kl(make({0.5, 0.5}), make({0.25, 0.75})) == doctest::Approx(expected));
}

TEST_CASE("divergence properties on random measures") {
    Rng rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.below(8);
        const auto P = test_support::random_measure(n, rng);
        const auto Q = test_support::random_measure(n, rng);
        const auto R = test_support::random_measure(n, rng);
        const double t = tv(P, Q);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
        CHECK(t == tv(Q, P));
        CHECK(tv(P, R) <= tv(P, Q) + tv(Q, R) + 1e-12);
        const double h2 = hellinger_sq(P, Q);
        CHECK(h2 / 2.0 <= t + 1e-12);
        CHECK(t <= std::sqrt(h2 * (1.0 - h2 / 4.0)) + 1e-12);
        CHECK(kl(P, Q) >= 0.0);
        CHECK(kl(P, P) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("total variation equals one minus the overlap") {
    // independent identity: TV(P,Q) = 1 - sum_i min(p_i, q_i)
    Rng rng(606);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng.below(10);
        const auto P = test_support::random_measure(n, rng);
        const auto Q = test_support::random_measure(n, rng);
        double overlap = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            overlap += std::min(P.weights()[i], Q.weights()[i]);
        CHECK(tv(P, Q) == doctest::Approx(1.0 - overlap).epsilon(1e-12));
    }
}

TEST_CASE("divergences ignore support enumeration order") {
    const DiscreteMeasure a({5, 2, 9}, {0.2, 0.5, 0.3});
    const DiscreteMeasure b({9, 5, 2}, {0.3, 0.2, 0.5});  // same measure, shuffled input
    const DiscreteMeasure q({2, 5, 9}, {0.4, 0.4, 0.2});
    CHECK(tv(a, q) == tv(b, q));
    CHECK(hellinger_sq(a, q) == hellinger_sq(b, q));
    CHECK(kl(a, q) == kl(b, q));
}
