#include "ambieq/calibration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ambieq {

CalibrationInput::CalibrationInput(double rho_hat_, int n_, double confidence_)
    : rho_hat(rho_hat_), n(n_), confidence(confidence_) {
    if (!(std::isfinite(rho_hat) && std::abs(rho_hat) < 1.0)) {
        throw std::invalid_argument("rho_hat must lie in (-1, 1)");
    }
    if (n < 4) {
        throw std::invalid_argument("n must be >= 4 (interval width uses n-3)");
    }
    if (!(std::isfinite(confidence) && confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
}

double fisher_z(double rho) {
    if (!(std::isfinite(rho) && std::abs(rho) < 1.0)) {
        throw std::domain_error("fisher_z requires |rho| < 1");
    }
    return std::atanh(rho);
}

double inverse_fisher(double z) { return std::tanh(z); }

namespace {

// Rational approximation to Phi^{-1}, |relative error| < 1.15e-9
// (P. Acklam's coefficients).
double quantile_estimate(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
                c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double t = q * q;
        return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t +
                a[5]) *
               q /
               (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t +
                1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_quantile requires p in (0, 1)");
    }
    double x = quantile_estimate(p);
    // One Newton step on F(x) = Phi(x) - p with Phi via erfc. Phi is
    // evaluated through the smaller tail for accuracy near p = 0 or 1.
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    constexpr double inv_sqrt2pi = 0.39894228040143267794;
    const double cdf = (x < 0.0) ? 0.5 * std::erfc(-x * inv_sqrt2)
                                 : 1.0 - 0.5 * std::erfc(x * inv_sqrt2);
    const double pdf = inv_sqrt2pi * std::exp(-0.5 * x * x);
    if (pdf > 0.0) x -= (cdf - p) / pdf;
    return x;
}

CalibratedBand ambiguity_radius(const CalibrationInput& input) {
    const double z = fisher_z(input.rho_hat);
    const double kappa = 1.0 - input.confidence;
    const double half_width =
        normal_quantile(1.0 - kappa / 2.0) / std::sqrt(double(input.n - 3));
    CalibratedBand out;
    out.rho = input.rho_hat;
    out.rho_lo = inverse_fisher(z - half_width);
    out.rho_hi = inverse_fisher(z + half_width);
    out.phi = std::max(out.rho_hi - input.rho_hat, input.rho_hat - out.rho_lo);
    out.admissible =
        std::abs(out.rho) + out.phi <= 1.0 - AmbiguityBand::kAdmissibilityMargin;
    return out;
}

}  // namespace ambieq
