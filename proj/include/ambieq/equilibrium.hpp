#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ambieq/market_model.hpp"
#include "ambieq/robust_strategy.hpp"

namespace ambieq {

/// The five competitive-market outcomes. Exactly one holds at any
/// admissible (s, params, band).
enum class EquilibriumRegime {
    ZeroUnderwriting,     ///< price at the upper bound, x* = 0
    UpperBoundDistorted,  ///< x* > 0, y* > 0, worst case xi = +phi
    LowerBoundDistorted,  ///< x* > 0, y* < 0, worst case xi = -phi
    PureUnderwriting,     ///< y* = 0, price set by pure risk sharing
    MarketFailure,        ///< no admissible price clears the market
};

const char* to_string(EquilibriumRegime r);

/// Effective correlation above which underwriting shuts down:
/// K = alpha*eta*sigma/(mu-r).
double zero_underwriting_correlation(const MarketParams& p);

/// Effective correlation at which the equilibrium investment position
/// vanishes: H(s) = (mu-r)/(eta*sigma) * (1/alpha + e^{-r(T-s)}/gamma).
/// Strictly increasing in s.
double zero_investment_correlation(double s, const MarketParams& p);

/// Effective correlation below which the distorted-equilibrium price
/// turns negative: Lb(s) = A - sqrt(A^2+1) with
/// A = (mu-r)/(2*eta*sigma) * e^{-r(T-s)}/gamma.
double price_floor_correlation(double s, const MarketParams& p);

/// Regime-condition diagnostics: the three thresholds at s and the
/// literal truth value of each of the five case conditions.
struct RegimeConditions {
    double K;
    double H;
    double Lb;
    std::array<bool, 5> holds;
    /// More than one literal condition true (possible only at exact
    /// boundary equality; classification then follows the fixed order
    /// 1, 4, 3, 2, 5).
    bool multiple_match;
};

RegimeConditions regime_conditions(double s, const MarketParams& p,
                                   const AmbiguityBand& band);

/// Unique regime at time s. Throws std::runtime_error carrying all five
/// condition values if no condition matches (floating-point boundary
/// pathology only).
EquilibriumRegime classify_regime(double s, const MarketParams& p,
                                  const AmbiguityBand& band);

/// Closed-form price/positions of the correlation-distorted equilibrium
/// evaluated at effective correlation v (= rho+phi in the upper regime,
/// rho-phi in the lower one). Exposed for sensitivity analysis.
struct DistortedEquilibrium {
    double theta;
    double x;
    double y;
};

DistortedEquilibrium distorted_equilibrium(double v, double s,
                                           const MarketParams& p);

/// Pure-underwriting equilibrium price eta^2 / ((1/alpha +
/// e^{-r(T-s)}/gamma) * l); independent of the band.
double pure_underwriting_price(double s, const MarketParams& p);

/// One time point of the market equilibrium. The starred quantities are
/// absent exactly when regime == MarketFailure; failure points instead
/// carry the inadmissible price the clearing condition would produce.
struct EquilibriumPoint {
    double s;
    EquilibriumRegime regime;
    std::optional<double> theta_star;
    std::optional<double> x_star;
    std::optional<double> y_star;
    std::optional<double> xi_star;
    std::optional<double> p_rate;
    RegimeConditions conditions;
    std::optional<double> failure_theta;
};

EquilibriumPoint equilibrium_point(double s, const MarketParams& p,
                                   const AmbiguityBand& band);

struct RegimeSwitch {
    double s;  ///< refined to 1e-8 years by bisection
    EquilibriumRegime from;
    EquilibriumRegime to;
};

struct EquilibriumPath {
    std::vector<EquilibriumPoint> points;
    std::vector<RegimeSwitch> switches;
};

/// Pointwise equilibrium on the grid plus switch detection. Each switch
/// time is refined by bisecting the regime classification between the
/// bracketing grid points (the boundary functions H, K, Lb are monotone
/// in s, so the bracket contains exactly one crossing per switch).
EquilibriumPath equilibrium_path(const TimeGrid& grid, const MarketParams& p,
                                 const AmbiguityBand& band);

/// Identifies the regime from observed positions (tolerance 1e-12 on
/// zero comparisons): y < 0 -> LowerBoundDistorted, y = 0 ->
/// PureUnderwriting, y > 0 with x = 0 -> ZeroUnderwriting, y > 0 with
/// x > 0 -> UpperBoundDistorted.
EquilibriumRegime regime_from_positions(double x, double y);

/// Equilibrium with phi = 0 (no ambiguity). Only three outcome families
/// survive: positive underwriting, zero underwriting, market failure.
EquilibriumPoint benchmark_no_ambiguity(double s, const MarketParams& p,
                                        double rho);

struct ConditionCheck {
    std::string name;
    bool satisfied;
};

/// The necessary-condition checklist used to prune regime sweeps:
/// lower-bound regime needs rho > 0 and alpha > (mu-r)/(eta*sigma);
/// market failure needs rho < 0.
std::vector<ConditionCheck> necessary_condition_checks(
    const MarketParams& p, const AmbiguityBand& band);

}  // namespace ambieq
