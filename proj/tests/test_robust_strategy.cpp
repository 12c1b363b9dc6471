#include <doctest.h>

#include <cmath>
#include <random>

#include "ambieq/robust_strategy.hpp"
#include "test_helpers.hpp"

using namespace ambieq;

TEST_CASE("strategy case classification examples") {
    CHECK(classify_strategy_case(0.0, 0.5, 0.3) ==
          StrategyCase::ZeroUnderwriting);
    CHECK(classify_strategy_case(0.0, 0.1, 0.5) ==
          StrategyCase::UpperDistortion);
    CHECK(classify_strategy_case(0.6, 0.05, 2.0) ==
          StrategyCase::LowerDistortion);
    CHECK(classify_strategy_case(0.0, 0.8, 1.5) ==
          StrategyCase::ZeroInvestment);
    CHECK_THROWS_AS(classify_strategy_case(0.0, 0.1, -0.5), std::domain_error);
}

TEST_CASE("case conditions partition the admissible space") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100000; ++i) {
        const double rho = helpers::uniform(rng, -0.95, 0.95);
        const double phi =
            helpers::uniform(rng, 0.0, 1.0 - std::abs(rho) - 1e-6);
        const double psi =
            std::exp(helpers::uniform(rng, std::log(1e-3), std::log(1e2)));
        const auto holds = strategy_case_conditions(rho, phi, psi);
        const int matches = int(holds[0]) + int(holds[1]) + int(holds[2]) +
                            int(holds[3]);
        REQUIRE(matches == 1);
        // classify picks exactly that case.
        const StrategyCase c = classify_strategy_case(rho, phi, psi);
        CHECK(holds[std::size_t(c)]);
    }
}

TEST_CASE("discount factor") {
    const auto p = helpers::benchmark_params();
    CHECK(discount_factor(50.0, p) == 1.0);
    CHECK(discount_factor(0.0, p) ==
          doctest::Approx(0.4723665527410147).epsilon(1e-14));
    CHECK_THROWS_AS(discount_factor(50.0 + 1e-9, p), std::domain_error);
    const MarketParams zero_rate(1, 0.28, 0.0, 0.02, 0.18, 2, 2, 0, 50);
    CHECK(discount_factor(17.0, zero_rate) == 1.0);
}

TEST_CASE("optimal control closed forms at the benchmark") {
    const auto p = helpers::benchmark_params();
    const double theta = 0.1064952200307016;

    SUBCASE("zero-investment case") {
        const AmbiguityBand band(0.0, 0.46);
        const auto ctrl = optimal_control_cara(theta, 0.0, p, band);
        CHECK(ctrl.strategy_case == StrategyCase::ZeroInvestment);
        CHECK(ctrl.x == doctest::Approx(0.3208213008246070).epsilon(1e-12));
        CHECK(ctrl.y == 0.0);
        CHECK(ctrl.xi_star ==
              doctest::Approx(0.2921362207819474).epsilon(1e-12));
        CHECK(ctrl.p_rate ==
              doctest::Approx(0.07232928500884918).epsilon(1e-12));
    }

    SUBCASE("degenerate upper distortion at phi = 0") {
        const AmbiguityBand band(0.0, 0.0);
        const auto ctrl = optimal_control_cara(theta, 0.0, p, band);
        CHECK(ctrl.strategy_case == StrategyCase::UpperDistortion);
        CHECK(ctrl.x == doctest::Approx(0.3208213008246070).epsilon(1e-12));
        CHECK(ctrl.y == doctest::Approx(0.1457921459077206).epsilon(1e-12));
        CHECK(ctrl.xi_star == 0.0);
    }

    SUBCASE("zero-underwriting utility gain rate") {
        // A tiny loading factor puts the insurer in the
        // zero-underwriting case for moderate positive rho.
        const AmbiguityBand band(0.3, 0.2);
        const auto ctrl = optimal_control_cara(1e-4, 0.0, p, band);
        CHECK(ctrl.strategy_case == StrategyCase::ZeroUnderwriting);
        CHECK(ctrl.x == 0.0);
        CHECK(ctrl.p_rate ==
              doctest::Approx(0.006172839506172839).epsilon(1e-13));
        CHECK(ctrl.y ==
              doctest::Approx(0.02 / (2.0 * 0.0324) * 0.4723665527410147)
                  .epsilon(1e-12));
    }
}

TEST_CASE("optimal control rejects bad inputs") {
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.0, 0.3);
    CHECK_THROWS_AS(optimal_control_cara(0.0, 0.0, p, band),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimal_control_cara(-0.1, 0.0, p, band),
                    std::invalid_argument);
    CHECK_THROWS_AS(optimal_control_cara(0.1, 51.0, p, band),
                    std::invalid_argument);
}

TEST_CASE("zero-underwriting distortion interval is intersected and flagged") {
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.8, 0.1);
    const auto ctrl = optimal_control_cara(1e-4, 0.0, p, band);
    REQUIRE(ctrl.strategy_case == StrategyCase::ZeroUnderwriting);
    // psi - rho is far below -phi here, so the unclipped optimality
    // interval sticks out of the ambiguity set.
    CHECK(ctrl.xi_interval_clipped);
    CHECK(ctrl.xi_lo == -band.phi);
    CHECK(ctrl.xi_hi == band.phi);
    CHECK(ctrl.xi_star == -band.phi);
}

TEST_CASE("control invariants on random draws") {
    std::mt19937_64 rng(97);
    int seen[4] = {0, 0, 0, 0};
    for (int i = 0; i < 5000; ++i) {
        const auto draw = helpers::random_scenario(rng);
        const double theta = helpers::random_theta(rng, draw.params);
        const auto ctrl =
            optimal_control_cara(theta, draw.s, draw.params, draw.band);
        seen[int(ctrl.strategy_case)]++;
        CHECK(ctrl.x >= 0.0);
        CHECK(std::abs(ctrl.xi_star) <= draw.band.phi + 1e-12);
        CHECK(ctrl.p_rate >= -1e-15);
        const double psi = profitability_psi(theta, draw.params);
        CHECK(ctrl.strategy_case ==
              classify_strategy_case(draw.band.rho, draw.band.phi, psi));
        switch (ctrl.strategy_case) {
            case StrategyCase::ZeroUnderwriting:
                CHECK(ctrl.x == 0.0);
                break;
            case StrategyCase::UpperDistortion:
                CHECK(ctrl.xi_star == draw.band.phi);
                break;
            case StrategyCase::LowerDistortion:
                CHECK(ctrl.xi_star == -draw.band.phi);
                break;
            case StrategyCase::ZeroInvestment:
                CHECK(ctrl.y == 0.0);
                break;
        }
    }
    // The random space must exercise every case.
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
    CHECK(seen[2] > 0);
    CHECK(seen[3] > 0);
}

TEST_CASE("Kuhn-Tucker residuals are nonnegative") {
    std::mt19937_64 rng(1234);
    int checked[3] = {0, 0, 0};
    for (int i = 0; i < 20000; ++i) {
        const auto draw = helpers::random_scenario(rng);
        const auto& p = draw.params;
        const double theta = helpers::random_theta(rng, p);
        const auto ctrl = optimal_control_cara(theta, draw.s, p, draw.band);
        const double vm_ratio = discount_factor(draw.s, p) / p.gamma;
        // Scale-fixed derivatives V_m = 1, V_mm = -1/vm_ratio.
        if (ctrl.strategy_case == StrategyCase::UpperDistortion &&
            draw.band.phi > 0.0) {
            const double lambda2 =
                ctrl.x * p.eta * ctrl.y * p.sigma / (draw.band.phi * vm_ratio);
            CHECK(lambda2 >= -1e-12);
            checked[0]++;
        } else if (ctrl.strategy_case == StrategyCase::LowerDistortion) {
            const double lambda2 = -ctrl.x * p.eta * ctrl.y * p.sigma /
                                   (draw.band.phi * vm_ratio);
            CHECK(lambda2 >= -1e-12);
            checked[1]++;
        } else if (ctrl.strategy_case == StrategyCase::ZeroUnderwriting) {
            const double lambda1 = (draw.band.rho + ctrl.xi_star) *
                                       (p.mu - p.r) * p.eta / p.sigma -
                                   theta * p.l;
            CHECK(lambda1 >= -1e-12);
            checked[2]++;
        }
    }
    CHECK(checked[0] > 100);
    CHECK(checked[1] > 100);
    CHECK(checked[2] > 100);
}

TEST_CASE("controls and p_rate are continuous across the case-2/4 boundary") {
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.0, 0.3);
    // psi^{-1} - rho = phi exactly at this loading factor.
    const double theta_boundary =
        p.eta * (p.mu - p.r) / (p.l * p.sigma * (band.rho + band.phi));
    REQUIRE(theta_boundary < price_upper_bound(p));

    const auto just_below =
        optimal_control_cara(theta_boundary * (1.0 - 1e-9), 0.0, p, band);
    const auto just_above =
        optimal_control_cara(theta_boundary * (1.0 + 1e-9), 0.0, p, band);
    CHECK(just_below.strategy_case == StrategyCase::UpperDistortion);
    CHECK(just_above.strategy_case == StrategyCase::ZeroInvestment);
    CHECK(just_below.x == doctest::Approx(just_above.x).epsilon(1e-6));
    CHECK(just_above.y == 0.0);
    CHECK(std::abs(just_below.y) < 1e-7);
    CHECK(just_below.p_rate ==
          doctest::Approx(just_above.p_rate).epsilon(1e-6));

    // Both branch formulas evaluated at the boundary itself agree.
    const double v = band.upper();
    const double disc = discount_factor(0.0, p);
    const double a = theta_boundary * p.l * p.sigma;
    const double b = (p.mu - p.r) * p.eta;
    const double x_upper =
        (a - v * b) * disc / (p.gamma * (1 - v * v) * p.eta * p.eta * p.sigma);
    const double x_zero_inv =
        theta_boundary * p.l * disc / (p.gamma * p.eta * p.eta);
    CHECK(x_upper == doctest::Approx(x_zero_inv).epsilon(1e-12));
    const double p_upper = (a * a - 2 * v * a * b + b * b) /
                           (2 * (1 - v * v) * p.eta * p.eta * p.sigma * p.sigma);
    const double p_zero_inv = theta_boundary * theta_boundary * p.l * p.l /
                              (2 * p.eta * p.eta);
    CHECK(p_upper == doctest::Approx(p_zero_inv).epsilon(1e-12));
}

TEST_CASE("near-boundary diagnostic flag") {
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.0, 0.3);
    const double theta_boundary =
        p.eta * (p.mu - p.r) / (p.l * p.sigma * (band.rho + band.phi));
    const auto at = optimal_control_cara(theta_boundary, 0.0, p, band);
    CHECK(at.near_boundary);
    const auto far = optimal_control_cara(theta_boundary * 1.5, 0.0, p, band);
    CHECK_FALSE(far.near_boundary);
}

TEST_CASE("value function closed form") {
    const auto p = helpers::benchmark_params();
    CHECK(value_function({0.0, 0.0, 0.0},
                         MarketParams(1, 1, 0.0, 0.02, 1, 1, 2, 0, 1)) ==
          doctest::Approx(-0.5).epsilon(1e-15));
    // r = 0 and t = T: V = -(1/2) e^{-2 m}.
    const MarketParams flat(1, 1, 0.0, 0.02, 1, 1, 2, 0, 1);
    CHECK(value_function({1.0, 1.0, 0.0}, flat) ==
          doctest::Approx(-0.06766764161830635).epsilon(1e-14));
    // Strictly negative and increasing in wealth.
    double prev = -1e300;
    for (double m : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        const double v = value_function({0.0, m, 0.4}, p);
        CHECK(v < 0.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("utility gain quadrature, constant-price path") {
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.0, 0.46);
    const double theta = 0.1064952200307016;
    // Constant theta keeps the zero-investment case throughout, where
    // p_s is constant; Simpson is exact.
    const double integral = integrate_utility_gain(
        [&](double) { return theta; }, 0.0, 50.0, p, band);
    const double p_rate = utility_gain_rate(theta, 0.0, p, band);
    CHECK(integral == doctest::Approx(50.0 * p_rate).epsilon(1e-13));
    CHECK(integrate_utility_gain([&](double) { return theta; }, 10.0, 10.0, p,
                                 band) == 0.0);
}

TEST_CASE("utility gain quadrature matches the reference integral") {
    // Lower-bound distorted scenario; integrand frozen from an
    // independent high-precision quadrature.
    const auto p = helpers::benchmark_params();
    const AmbiguityBand band(0.5, 0.05);
    const double w = band.lower();
    const auto theta_of_s = [&](double s) {
        const double disc = std::exp(-p.r * (p.T - s));
        return (p.gamma * (1 - w * w) * p.eta * p.eta +
                w * (p.mu - p.r) / p.sigma * p.eta * disc) /
               (p.l / p.alpha * p.gamma * (1 - w * w) + p.l * disc);
    };
    const double integral =
        integrate_utility_gain(theta_of_s, 0.0, 50.0, p, band);
    CHECK(integral == doctest::Approx(2.6804498798483357).epsilon(1e-10));
}
