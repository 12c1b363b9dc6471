#include "ambieq/equilibrium.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ambieq {

const char* to_string(EquilibriumRegime r) {
    switch (r) {
        case EquilibriumRegime::ZeroUnderwriting: return "zero_underwriting";
        case EquilibriumRegime::UpperBoundDistorted: return "upper_bound_distorted";
        case EquilibriumRegime::LowerBoundDistorted: return "lower_bound_distorted";
        case EquilibriumRegime::PureUnderwriting: return "pure_underwriting";
        case EquilibriumRegime::MarketFailure: return "market_failure";
    }
    return "?";
}

double zero_underwriting_correlation(const MarketParams& p) {
    return p.alpha * p.eta * p.sigma / (p.mu - p.r);
}

double zero_investment_correlation(double s, const MarketParams& p) {
    const double disc = std::exp(-p.r * (p.T - s));
    return (p.mu - p.r) / (p.eta * p.sigma) *
           (1.0 / p.alpha + disc / p.gamma);
}

double price_floor_correlation(double s, const MarketParams& p) {
    const double a = (p.mu - p.r) / (2.0 * p.eta * p.sigma) *
                     std::exp(-p.r * (p.T - s)) / p.gamma;
    return a - std::sqrt(a * a + 1.0);
}

RegimeConditions regime_conditions(double s, const MarketParams& p,
                                   const AmbiguityBand& band) {
    RegimeConditions rc{};
    rc.K = zero_underwriting_correlation(p);
    rc.H = zero_investment_correlation(s, p);
    rc.Lb = price_floor_correlation(s, p);
    const double up = band.upper();
    const double lo = band.lower();
    rc.holds = {
        up >= rc.K,
        rc.Lb <= up && up < rc.K && up < rc.H,
        rc.H < lo && lo < rc.K,
        lo <= rc.H && rc.H <= up,
        up < rc.Lb && up < rc.K && up < rc.H,
    };
    int matches = 0;
    for (bool h : rc.holds) matches += h ? 1 : 0;
    rc.multiple_match = matches > 1;
    return rc;
}

EquilibriumRegime classify_regime(double s, const MarketParams& p,
                                  const AmbiguityBand& band) {
    if (!(s >= p.t0 && s <= p.T)) {
        throw std::invalid_argument("time s must lie in [t0, T]");
    }
    const RegimeConditions rc = regime_conditions(s, p, band);
    // Literal condition order 1, 4, 3, 2, 5 resolves measure-zero ties.
    if (rc.holds[0]) return EquilibriumRegime::ZeroUnderwriting;
    if (rc.holds[3]) return EquilibriumRegime::PureUnderwriting;
    if (rc.holds[2]) return EquilibriumRegime::LowerBoundDistorted;
    if (rc.holds[1]) return EquilibriumRegime::UpperBoundDistorted;
    if (rc.holds[4]) return EquilibriumRegime::MarketFailure;
    std::ostringstream msg;
    msg << "no equilibrium condition matches at s=" << s
        << " rho+phi=" << band.upper() << " rho-phi=" << band.lower()
        << " K=" << rc.K << " H=" << rc.H << " Lb=" << rc.Lb
        << " holds=[" << rc.holds[0] << rc.holds[1] << rc.holds[2]
        << rc.holds[3] << rc.holds[4] << "]";
    throw std::runtime_error(msg.str());
}

DistortedEquilibrium distorted_equilibrium(double v, double s,
                                           const MarketParams& p) {
    const double disc = std::exp(-p.r * (p.T - s));
    const double excess = p.mu - p.r;
    const double one_minus_v2 = 1.0 - v * v;
    const double denom = p.gamma / p.alpha * one_minus_v2 + disc;
    DistortedEquilibrium out;
    out.theta = (p.gamma * one_minus_v2 * p.eta * p.eta +
                 v * excess / p.sigma * p.eta * disc) /
                (p.l / p.alpha * p.gamma * one_minus_v2 + p.l * disc);
    out.x = (1.0 - v * excess / (p.alpha * p.eta * p.sigma)) * disc / denom;
    out.y = (1.0 / p.alpha + disc / p.gamma - v * p.eta * p.sigma / excess) *
            excess / (p.sigma * p.sigma) * disc / denom;
    return out;
}

double pure_underwriting_price(double s, const MarketParams& p) {
    const double disc = std::exp(-p.r * (p.T - s));
    return p.eta * p.eta / ((1.0 / p.alpha + disc / p.gamma) * p.l);
}

EquilibriumPoint equilibrium_point(double s, const MarketParams& p,
                                   const AmbiguityBand& band) {
    EquilibriumPoint pt{};
    pt.s = s;
    pt.regime = classify_regime(s, p, band);
    pt.conditions = regime_conditions(s, p, band);
    const double disc = std::exp(-p.r * (p.T - s));

    switch (pt.regime) {
        case EquilibriumRegime::ZeroUnderwriting: {
            pt.theta_star = price_upper_bound(p);
            pt.x_star = 0.0;
            pt.y_star = (p.mu - p.r) / (p.gamma * p.sigma * p.sigma) * disc;
            break;
        }
        case EquilibriumRegime::UpperBoundDistorted: {
            const auto eq = distorted_equilibrium(band.upper(), s, p);
            if (eq.theta < -1e-14) {
                throw std::logic_error(
                    "upper-bound distorted price unexpectedly negative");
            }
            pt.theta_star = eq.theta;
            pt.x_star = eq.x;
            pt.y_star = eq.y;
            break;
        }
        case EquilibriumRegime::LowerBoundDistorted: {
            const auto eq = distorted_equilibrium(band.lower(), s, p);
            pt.theta_star = eq.theta;
            pt.x_star = eq.x;
            pt.y_star = eq.y;
            break;
        }
        case EquilibriumRegime::PureUnderwriting: {
            pt.theta_star = pure_underwriting_price(s, p);
            pt.x_star = disc / p.gamma / (1.0 / p.alpha + disc / p.gamma);
            pt.y_star = 0.0;
            break;
        }
        case EquilibriumRegime::MarketFailure: {
            // Diagnostics only: the clearing price the distorted branch
            // would produce, inadmissible (< 0) in this region.
            pt.failure_theta = distorted_equilibrium(band.upper(), s, p).theta;
            return pt;
        }
    }

    const auto ctrl = optimal_control_cara(*pt.theta_star, s, p, band);
    pt.xi_star = ctrl.xi_star;
    pt.p_rate = ctrl.p_rate;
    return pt;
}

namespace {

struct SwitchHit {
    double at;
    EquilibriumRegime to;
};

// Refines the first regime change in [lo, hi], where classify(lo) ==
// from and classify(hi) != from, to 1e-8 years.
SwitchHit bisect_switch(double lo, double hi, EquilibriumRegime from,
                        const MarketParams& p, const AmbiguityBand& band) {
    EquilibriumRegime hi_regime = classify_regime(hi, p, band);
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        const EquilibriumRegime mid_regime = classify_regime(mid, p, band);
        if (mid_regime == from) {
            lo = mid;
        } else {
            hi = mid;
            hi_regime = mid_regime;
        }
    }
    return {0.5 * (lo + hi), hi_regime};
}

}  // namespace

EquilibriumPath equilibrium_path(const TimeGrid& grid, const MarketParams& p,
                                 const AmbiguityBand& band) {
    EquilibriumPath path;
    path.points.reserve(grid.size());
    for (double s : grid.times()) {
        path.points.push_back(equilibrium_point(s, p, band));
    }
    for (std::size_t i = 0; i + 1 < path.points.size(); ++i) {
        double lo = path.points[i].s;
        const double segment_end = path.points[i + 1].s;
        EquilibriumRegime from = path.points[i].regime;
        const EquilibriumRegime target = path.points[i + 1].regime;
        // A grid step could in principle straddle several boundaries
        // (the boundary functions are monotone, so each is crossed at
        // most once); walk forward until the end regime is reached.
        for (int guard = 0; from != target && guard < 8; ++guard) {
            const SwitchHit hit = bisect_switch(lo, segment_end, from, p, band);
            if (hit.to == from) break;
            path.switches.push_back({hit.at, from, hit.to});
            from = hit.to;
            lo = hit.at;
        }
    }
    return path;
}

EquilibriumRegime regime_from_positions(double x, double y) {
    constexpr double tol = 1e-12;
    if (std::abs(y) <= tol) return EquilibriumRegime::PureUnderwriting;
    if (y < 0.0) return EquilibriumRegime::LowerBoundDistorted;
    if (std::abs(x) <= tol) return EquilibriumRegime::ZeroUnderwriting;
    return EquilibriumRegime::UpperBoundDistorted;
}

EquilibriumPoint benchmark_no_ambiguity(double s, const MarketParams& p,
                                        double rho) {
    const AmbiguityBand band(rho, 0.0);
    EquilibriumPoint pt = equilibrium_point(s, p, band);
    // With phi = 0 the distorted cases collapse; only three outcome
    // families remain. Positive underwriting must mean x* > 0.
    if (pt.regime != EquilibriumRegime::MarketFailure &&
        pt.regime != EquilibriumRegime::ZeroUnderwriting &&
        !(*pt.x_star > 0.0)) {
        throw std::logic_error(
            "benchmark equilibrium produced non-positive underwriting");
    }
    return pt;
}

std::vector<ConditionCheck> necessary_condition_checks(
    const MarketParams& p, const AmbiguityBand& band) {
    return {
        {"lower_bound_requires_rho_positive", band.rho > 0.0},
        {"lower_bound_requires_alpha_above_excess_per_risk",
         p.alpha > (p.mu - p.r) / (p.eta * p.sigma)},
        {"failure_requires_rho_negative", band.rho < 0.0},
    };
}

}  // namespace ambieq
