#include <doctest.h>

#include <cmath>

#include "ambieq/calibration.hpp"

using namespace ambieq;

namespace {

// Test-only normal CDF via adaptive Simpson quadrature of the density,
// independent of the erfc route used by the implementation.
double phi_pdf(double x) {
    return 0.3989422804014326779399461 * std::exp(-0.5 * x * x);
}

double simpson(double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (phi_pdf(a) + 4.0 * phi_pdf(m) + phi_pdf(b));
}

double adaptive(double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(a, m);
    const double right = simpson(m, b);
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive(a, m, left, tol / 2.0, depth + 1) +
           adaptive(m, b, right, tol / 2.0, depth + 1);
}

double normal_cdf_quadrature(double x) {
    if (x < 0.0) return 1.0 - normal_cdf_quadrature(-x);
    return 0.5 + adaptive(0.0, x, simpson(0.0, x), 1e-15, 0);
}

// Reference quantile: bisection on the quadrature CDF.
double quantile_oracle(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf_quadrature(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("fisher transform") {
    CHECK(fisher_z(0.0) == 0.0);
    CHECK(fisher_z(0.5) == doctest::Approx(0.5493061443340548).epsilon(1e-14));
    CHECK(fisher_z(-0.5) == doctest::Approx(-fisher_z(0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(fisher_z(1.0), std::domain_error);
    CHECK_THROWS_AS(fisher_z(-1.2), std::domain_error);
    CHECK(inverse_fisher(0.0) == 0.0);
    CHECK(inverse_fisher(50.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fisher round trip to 1e-14") {
    for (int i = 0; i < 1000; ++i) {
        const double rho = -0.999 + 1.998 * double(i) / 999.0;
        CHECK(inverse_fisher(fisher_z(rho)) ==
              doctest::Approx(rho).epsilon(1e-14));
    }
}

TEST_CASE("normal quantile against quadrature oracle") {
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) ==
          doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.995) ==
          doctest::Approx(2.5758293035489004).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);

    const double probes[] = {1e-7,  1e-4, 0.012, 0.05, 0.2, 0.5,
                             0.777, 0.95, 0.99,  0.999, 1.0 - 1e-7};
    for (double p : probes) {
        const double q = normal_quantile(p);
        CHECK(std::abs(q - quantile_oracle(p)) < 1e-9);
        // Symmetry.
        CHECK(normal_quantile(1.0 - p) == doctest::Approx(-q).epsilon(1e-9));
    }
}

TEST_CASE("ambiguity radius reproduces the confidence family") {
    // Frozen against an independent high-precision evaluation of
    // tanh(z_{1-kappa/2} / sqrt(27)).
    const CalibratedBand c90 = ambiguity_radius({0.0, 30, 0.90});
    const CalibratedBand c95 = ambiguity_radius({0.0, 30, 0.95});
    const CalibratedBand c99 = ambiguity_radius({0.0, 30, 0.99});
    CHECK(c90.phi == doctest::Approx(0.3063861091338217).epsilon(1e-10));
    CHECK(c95.phi == doctest::Approx(0.3602692225955644).epsilon(1e-10));
    CHECK(c99.phi == doctest::Approx(0.4587433902341796).epsilon(1e-10));
    // Symmetric interval at rho_hat = 0.
    CHECK(c95.rho_lo == doctest::Approx(-c95.rho_hi).epsilon(1e-15));
    CHECK(c95.admissible);

    const CalibratedBand tiny = ambiguity_radius({0.0, 30, 1e-9});
    CHECK(tiny.phi < 1e-8);
}

TEST_CASE("calibration input validation") {
    CHECK_THROWS_AS(CalibrationInput(1.0, 30, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(CalibrationInput(0.0, 3, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(CalibrationInput(0.0, 30, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CalibrationInput(0.0, 30, 1.0), std::invalid_argument);
}

TEST_CASE("phi monotone in confidence and in n") {
    double prev = 0.0;
    for (double conf : {0.5, 0.8, 0.9, 0.95, 0.99, 0.999}) {
        const double phi = ambiguity_radius({0.2, 30, conf}).phi;
        CHECK(phi > prev);
        prev = phi;
    }
    // The wider arm can exceed 1 for very small samples; monotonicity in
    // n still holds.
    prev = 2.0;
    for (int n : {5, 10, 30, 100, 1000}) {
        const double phi = ambiguity_radius({0.2, n, 0.95}).phi;
        CHECK(phi < prev);
        prev = phi;
    }
}

TEST_CASE("asymmetric max rule picks the wider arm") {
    // After back-transform the arm away from zero correlation is wider,
    // so for rho_hat > 0 phi = rho_hat - rho_lo.
    for (double rho_hat : {0.1, 0.3, 0.5, 0.8}) {
        const CalibratedBand cal = ambiguity_radius({rho_hat, 30, 0.95});
        CHECK(cal.rho_lo <= rho_hat);
        CHECK(cal.rho_hi >= rho_hat);
        CHECK(cal.phi ==
              doctest::Approx(rho_hat - cal.rho_lo).epsilon(1e-15));
        CHECK(rho_hat - cal.rho_lo > cal.rho_hi - rho_hat);
    }
    for (double rho_hat : {-0.1, -0.4, -0.7}) {
        const CalibratedBand cal = ambiguity_radius({rho_hat, 30, 0.95});
        CHECK(cal.phi ==
              doctest::Approx(cal.rho_hi - rho_hat).epsilon(1e-15));
    }
}

TEST_CASE("inadmissible calibrated band is flagged, not clipped") {
    const CalibratedBand cal = ambiguity_radius({0.9, 5, 0.999});
    CHECK_FALSE(cal.admissible);
    CHECK(std::abs(cal.rho) + cal.phi > 1.0 - 1e-9);
    CHECK_THROWS_AS(cal.band(), std::invalid_argument);
}
