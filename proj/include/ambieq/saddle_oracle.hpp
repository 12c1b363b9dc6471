#pragma once

#include "ambieq/market_model.hpp"
#include "ambieq/robust_strategy.hpp"

namespace ambieq {

/// Grid for the brute-force max-min search. x spans [0, x_max], y spans
/// [-y_abs_max, y_abs_max], xi spans [-phi, phi]. ny and nxi must be odd
/// so the grids contain 0 exactly; endpoints are always on the grid.
struct GridSpec {
    double x_max;
    double y_abs_max;
    int nx = 401;
    int ny = 401;
    int nxi = 21;
};

/// Discrete argmax-min and its distance to the analytic optimum.
struct SaddleResult {
    double x_hat;
    double y_hat;
    double xi_hat;
    double f_hat;
    double gap_x;
    double gap_y;
    double gap_xi;
    double gap_to_analytic;  ///< max of the coordinate gaps
    double step_x;
    double step_y;
    double step_xi;
    int expansions = 0;  ///< cap doublings applied to satisfy coverage
};

/// -V_m/V_mm for the CARA value function: e^{-r(T-s)}/gamma. The only
/// way wealth derivatives enter the optimal controls.
double cara_vm_ratio(double s, const MarketParams& p);

/// Inner HJBI objective with general derivatives:
/// Vm*(x*theta*l + y*(mu-r)) + Vmm/2*(x^2 eta^2 + 2(rho+xi)x eta y sigma
/// + y^2 sigma^2); the control-independent wealth drift term is dropped.
double hamiltonian_general(double x, double y, double xi, double theta,
                           double vm, double vmm, const MarketParams& p,
                           const AmbiguityBand& band);

/// Scale-fixed objective with V_m = 1, V_mm = -1/vm_ratio. The
/// argmax-min is invariant to this positive rescaling.
double hamiltonian_f(double x, double y, double xi, double theta,
                     const MarketParams& p, const AmbiguityBand& band,
                     double vm_ratio);

/// Default caps: twice the analytic optimum, floored at 1 in each
/// coordinate, so the saddle is interior without manual tuning.
GridSpec default_grid_spec(double theta, double s, const MarketParams& p,
                           const AmbiguityBand& band, int nx = 401,
                           int ny = 401, int nxi = 21);

/// Discrete max over (x, y) of the min over xi of hamiltonian_f. The
/// inner objective is linear in xi, so by default only the endpoints
/// (plus xi = 0) are probed; full_xi_grid evaluates every xi point as an
/// independent check mode. Caps are doubled (at most twice) until they
/// exceed the analytic optimum by 2x; coverage failure beyond that
/// throws.
SaddleResult grid_maxmin(double theta, double s, const MarketParams& p,
                         const AmbiguityBand& band, GridSpec grid,
                         double vm_ratio, bool full_xi_grid = false);

/// Relative residual of the HJBI equation at the analytic optimum,
/// using the closed-form value function derivatives. The wealth terms
/// cancel exactly, so the residual is wealth-free:
///   p_s - gamma e^{r(T-s)} (x theta l + y(mu-r))
///       + (gamma^2/2) e^{2r(T-s)} (x^2 eta^2 + 2(rho+xi*)x eta y sigma
///                                  + y^2 sigma^2),
/// normalised by the largest constituent term.
double hjbi_relative_residual(double theta, double s, const MarketParams& p,
                              const AmbiguityBand& band);

}  // namespace ambieq
