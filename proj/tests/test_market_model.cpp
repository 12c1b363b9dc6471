#include <doctest.h>

#include <random>

#include "ambieq/market_model.hpp"
#include "test_helpers.hpp"

using namespace ambieq;

TEST_CASE("market params validate at construction") {
    CHECK_NOTHROW(helpers::benchmark_params());
    CHECK_THROWS_WITH_AS(
        MarketParams(0.0, 0.28, 0.015, 0.035, 0.18, 2, 2, 0, 50),
        "l must be > 0", std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        MarketParams(1.0, 0.28, 0.05, 0.03, 0.18, 2, 2, 0, 50),
        "mu must exceed r", std::invalid_argument);
    CHECK_THROWS_AS(MarketParams(1.0, 0.28, 0.015, 0.035, 0.18, 2, 2, 50, 50),
                    std::invalid_argument);
    CHECK_THROWS_AS(MarketParams(1.0, -0.1, 0.015, 0.035, 0.18, 2, 2, 0, 50),
                    std::invalid_argument);
}

TEST_CASE("ambiguity band admissibility is strict with margin") {
    CHECK_NOTHROW(AmbiguityBand(0.0, 0.99));
    CHECK_THROWS_AS(AmbiguityBand(0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(AmbiguityBand(0.5, 0.5 - 1e-10), std::invalid_argument);
    CHECK_NOTHROW(AmbiguityBand(0.5, 0.5 - 1e-8));
    CHECK_THROWS_AS(AmbiguityBand(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(AmbiguityBand(0.0, -0.1), std::invalid_argument);

    const AmbiguityBand clipped = AmbiguityBand::clamped(0.3, 0.9);
    CHECK(clipped.clipped);
    CHECK(clipped.phi == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(std::abs(clipped.rho) + clipped.phi <= 1.0 - 1e-9);
    const AmbiguityBand untouched = AmbiguityBand::clamped(0.3, 0.2);
    CHECK_FALSE(untouched.clipped);
    CHECK(untouched.phi == 0.2);
}

TEST_CASE("time grid validates monotonicity") {
    CHECK_THROWS_AS(TimeGrid({1.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid({2.0, 1.0}), std::invalid_argument);
    const TimeGrid grid = TimeGrid::regular(0.0, 50.0, 0.5);
    CHECK(grid.size() == 101);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 50.0);
    const TimeGrid ragged = TimeGrid::regular(0.0, 1.0, 0.3);
    CHECK(ragged.back() == 1.0);
}

TEST_CASE("price upper bound") {
    const auto p = helpers::benchmark_params();
    CHECK(price_upper_bound(p) == doctest::Approx(0.1568).epsilon(1e-14));
    CHECK(price_upper_bound(MarketParams(1, 1, 0.0, 0.02, 1, 1, 1, 0, 1)) ==
          doctest::Approx(1.0));
    CHECK(price_upper_bound(MarketParams(2, 0.5, 0.0, 0.02, 1, 2, 1, 0, 1)) ==
          doctest::Approx(0.25));
    CHECK(price_bounds(p).lower == 0.0);
}

TEST_CASE("demand closed form and bounds") {
    const auto p = helpers::benchmark_params();
    CHECK(demand(0.0, p) == 1.0);
    CHECK(demand(price_upper_bound(p), p) == 0.0);  // exactly
    CHECK(demand(0.1064952200307016, p) ==
          doctest::Approx(0.3208213008246070).epsilon(1e-12));
    CHECK_THROWS_AS(demand(-1e-12, p), std::domain_error);
    CHECK_THROWS_AS(demand(0.1568 + 1e-9, p), std::domain_error);
    // The error names the violated bound.
    try {
        demand(0.2, p);
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("upper price bound") !=
              std::string::npos);
    }
}

TEST_CASE("demand is affine, decreasing, within [0, 1]") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const auto draw = helpers::random_scenario(rng);
        const double ub = price_upper_bound(draw.params);
        const double t1 = helpers::uniform(rng, 0.0, ub);
        const double t2 = helpers::uniform(rng, 0.0, ub);
        const double d1 = demand(t1, draw.params);
        const double d2 = demand(t2, draw.params);
        CHECK(d1 >= 0.0);
        CHECK(d1 <= 1.0);
        if (t1 < t2) CHECK(d1 >= d2);
        // Affinity: the midpoint interpolates exactly.
        const double dm = demand(0.5 * (t1 + t2), draw.params);
        CHECK(dm == doctest::Approx(0.5 * (d1 + d2)).epsilon(1e-12));
    }
}

TEST_CASE("profitability ratio") {
    const auto p = helpers::benchmark_params();
    CHECK(profitability_psi(0.0, p) == 0.0);
    CHECK(profitability_psi(0.1568, p) == doctest::Approx(5.04).epsilon(1e-13));
    CHECK(profitability_psi(0.1064952200307016, p) ==
          doctest::Approx(3.4230606438439806).epsilon(1e-12));
    CHECK_THROWS_AS(profitability_psi(-0.1, p), std::domain_error);
}

TEST_CASE("psi at the upper price bound equals alpha*eta*sigma/(mu-r)") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const auto draw = helpers::random_scenario(rng);
        const auto& p = draw.params;
        const double lhs = profitability_psi(price_upper_bound(p), p);
        const double rhs = p.alpha * p.eta * p.sigma / (p.mu - p.r);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("sharpe ratio") {
    const auto p = helpers::benchmark_params();
    CHECK(sharpe_ratio(p) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(sharpe_ratio(MarketParams(1, 1, 0.01, 0.01 + 0.3, 0.3, 1, 1, 0, 1)) ==
          doctest::Approx(1.0));
    CHECK(sharpe_ratio(MarketParams(1, 1, 0.01, 0.05, 0.2, 1, 1, 0, 1)) ==
          doctest::Approx(0.2));
}
