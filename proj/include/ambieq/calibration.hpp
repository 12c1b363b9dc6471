#pragma once

#include "ambieq/market_model.hpp"

namespace ambieq {

/// Sample-correlation estimate with its estimation context.
struct CalibrationInput {
    double rho_hat;     ///< sample correlation, |rho_hat| < 1
    int n;              ///< observation count, >= 4 (variance uses n-3)
    double confidence;  ///< coverage level 1-kappa, in (0, 1)

    CalibrationInput(double rho_hat, int n, double confidence);
};

/// Fisher-interval calibration result. The interval endpoints are the
/// back-transformed confidence bounds; phi is the wider arm. The band
/// may be inadmissible for the equilibrium engine (|rho|+phi too close
/// to 1); in that case band() throws and admissible is false.
struct CalibratedBand {
    double rho;
    double phi;
    double rho_lo;
    double rho_hi;
    bool admissible;

    AmbiguityBand band() const { return AmbiguityBand(rho, phi); }
};

/// Fisher z-transform, 0.5*ln((1+rho)/(1-rho)). Domain |rho| < 1.
double fisher_z(double rho);

/// Inverse Fisher transform, tanh(z).
double inverse_fisher(double z);

/// Standard normal quantile Phi^{-1}(p), absolute error below 1e-9.
/// Rational initial estimate refined with one Newton step on the
/// erfc-based CDF; implemented in-repo so that calibration output is
/// reproducible bit-for-bit across environments.
double normal_quantile(double p);

/// Maps estimation uncertainty to an ambiguity radius: transform,
/// half-width z_{1-kappa/2}/sqrt(n-3), back-transform, and take the
/// wider arm phi = max(rho_hi - rho_hat, rho_hat - rho_lo).
CalibratedBand ambiguity_radius(const CalibrationInput& input);

}  // namespace ambieq
