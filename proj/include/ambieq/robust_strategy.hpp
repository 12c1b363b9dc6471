#pragma once

#include <array>
#include <functional>
#include <span>

#include "ambieq/market_model.hpp"

namespace ambieq {

/// The four mutually exclusive optimal-policy cases for the insurer's
/// robust underwriting/investment problem at a given (rho, phi, psi).
enum class StrategyCase {
    ZeroUnderwriting,  ///< x = 0, interior worst-case distortion
    UpperDistortion,   ///< x > 0, y > 0, worst case at xi = +phi
    LowerDistortion,   ///< x > 0, y < 0, worst case at xi = -phi
    ZeroInvestment,    ///< y = 0, interior worst-case distortion
};

const char* to_string(StrategyCase c);

/// Robust optimal control at one instant.
struct OptimalControl {
    double x;                 ///< underwriting amount, >= 0
    double y;                 ///< risky investment (any sign)
    double xi_star;           ///< worst-case correlation distortion
    StrategyCase strategy_case;
    double p_rate;            ///< instantaneous utility-gain rate, >= 0

    /// Admissible distortion interval. Degenerate ([xi_star, xi_star])
    /// except in the ZeroUnderwriting case, where any distortion in
    /// [max(psi-rho, -phi), phi] is worst-case-optimal; xi_star is the
    /// minimal (least-committal) representative.
    double xi_lo;
    double xi_hi;
    /// True when the raw optimality interval [psi-rho, phi] had to be
    /// intersected with the ambiguity set [-phi, phi].
    bool xi_interval_clipped = false;
    /// True when (rho, phi, psi) lies within 1e-12 of a case boundary;
    /// the returned case then follows the literal inequalities.
    bool near_boundary = false;
};

/// The literal truth values of the four case conditions. Under
/// admissibility (|rho|+phi < 1) and psi > 0 exactly one entry is true.
std::array<bool, 4> strategy_case_conditions(double rho, double phi,
                                             double psi);

/// Unique strategy case by the literal inequalities, evaluated in order
/// ZeroUnderwriting, UpperDistortion, LowerDistortion, ZeroInvestment.
/// psi = 0 is accepted only when the first condition already holds
/// (psi^{-1} is undefined otherwise).
StrategyCase classify_strategy_case(double rho, double phi, double psi);

/// Diagnostic: input lies within tol of some case boundary.
bool near_strategy_boundary(double rho, double phi, double psi,
                            double tol = 1e-12);

/// e^{-r(T-s)}; throws std::domain_error when s > T.
double discount_factor(double s, const MarketParams& p);

/// Closed-form robust optimal control for the CARA insurer at time s
/// facing loading factor theta > 0. The wealth level enters only via
/// the derivative ratio -V_m/V_mm = e^{-r(T-s)}/gamma, so no wealth
/// argument is needed.
OptimalControl optimal_control_cara(double theta, double s,
                                    const MarketParams& p,
                                    const AmbiguityBand& band);

/// The case-matched utility-gain rate p_s; equals
/// optimal_control_cara(...).p_rate.
double utility_gain_rate(double theta, double s, const MarketParams& p,
                         const AmbiguityBand& band);

struct ValueFunctionParams {
    double t;           ///< current time
    double m;           ///< current wealth
    double p_integral;  ///< int_t^T p_s ds along the given price path
};

/// CARA value function
///   V(t, m) = -(1/gamma) exp{ -gamma m e^{r(T-t)} - p_integral }.
double value_function(const ValueFunctionParams& vp, const MarketParams& p);

/// Composite-Simpson quadrature of p_s over [t, t_end] along a price
/// path theta(s). The integrand is smooth inside a regime and kinks at
/// regime switches, so the quadrature splits at the supplied switch
/// times and refines each segment to sub-steps of at most max_step.
double integrate_utility_gain(const std::function<double(double)>& theta_of_s,
                              double t, double t_end, const MarketParams& p,
                              const AmbiguityBand& band,
                              std::span<const double> split_times = {},
                              double max_step = 0.01);

}  // namespace ambieq
