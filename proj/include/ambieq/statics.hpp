#pragma once

#include <array>
#include <optional>

#include "ambieq/equilibrium.hpp"
#include "ambieq/market_model.hpp"

namespace ambieq {

enum class StaticsQuantity { Price, Underwriting, Investment };
enum class StaticsDriver { UpperCorrelation, LowerCorrelation, SharpeRatio };

const char* to_string(StaticsQuantity q);
const char* to_string(StaticsDriver d);

/// One comparative-statics claim: the analytic derivative sign of an
/// equilibrium quantity with respect to a driver, plus the central
/// finite difference that checks it. Whenever |fd_value| > 1e-8 its
/// sign must equal analytic_sign. threshold carries the parameter
/// threshold the sign comparison was decided by where one exists.
struct SensitivityReport {
    StaticsQuantity quantity;
    StaticsDriver driver;
    int analytic_sign;  // -1, 0, +1
    double fd_value;
    std::optional<double> threshold;
};

/// Central-difference step for correlation drivers and the Sharpe ratio.
inline constexpr double kStaticsFdStep = 1e-6;

/// Sensitivities of (theta*, x*, y*) to rho+phi inside the upper-bound
/// distorted regime. For rho+phi <= 0 the signs are (+, -, -)
/// unconditionally; for rho+phi > 0 they are decided by the threshold
/// expressions. Throws when the regime at s is not UpperBoundDistorted.
std::array<SensitivityReport, 3> upper_regime_signs(double s,
                                                    const MarketParams& p,
                                                    const AmbiguityBand& band);

/// Sensitivities of (theta*, x*, y*) to rho-phi inside the lower-bound
/// distorted regime: (-, +, -) unconditionally.
std::array<SensitivityReport, 3> lower_regime_signs(double s,
                                                    const MarketParams& p,
                                                    const AmbiguityBand& band);

/// Sensitivities to the Sharpe ratio (mu-r)/sigma, differentiated along
/// the mu direction with sigma fixed. Signs per regime:
/// zero underwriting (0, 0, +); upper-bound (sgn(rho+phi),
/// -sgn(rho+phi), +); lower-bound (+, -, +); pure underwriting (0, 0, 0).
/// Throws in the market-failure regime.
std::array<SensitivityReport, 3> sharpe_signs(double s, const MarketParams& p,
                                              const AmbiguityBand& band);

}  // namespace ambieq
