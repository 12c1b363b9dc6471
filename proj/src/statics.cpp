#include "ambieq/statics.hpp"

#include <cmath>
#include <stdexcept>

namespace ambieq {

const char* to_string(StaticsQuantity q) {
    switch (q) {
        case StaticsQuantity::Price: return "theta";
        case StaticsQuantity::Underwriting: return "x";
        case StaticsQuantity::Investment: return "y";
    }
    return "?";
}

const char* to_string(StaticsDriver d) {
    switch (d) {
        case StaticsDriver::UpperCorrelation: return "rho_plus_phi";
        case StaticsDriver::LowerCorrelation: return "rho_minus_phi";
        case StaticsDriver::SharpeRatio: return "sharpe";
    }
    return "?";
}

namespace {

void require_regime(EquilibriumRegime actual, EquilibriumRegime wanted) {
    if (actual != wanted) {
        throw std::invalid_argument(
            std::string("comparative statics requested for regime ") +
            to_string(wanted) + " but the equilibrium at s is " +
            to_string(actual));
    }
}

int sign_of_comparison(double value, double threshold) {
    if (value < threshold) return 1;
    if (value > threshold) return -1;
    return 0;
}

}  // namespace

std::array<SensitivityReport, 3> upper_regime_signs(double s,
                                                    const MarketParams& p,
                                                    const AmbiguityBand& band) {
    require_regime(classify_regime(s, p, band),
                   EquilibriumRegime::UpperBoundDistorted);
    const double v = band.upper();
    const double h = kStaticsFdStep;
    const auto up = distorted_equilibrium(v + h, s, p);
    const auto dn = distorted_equilibrium(v - h, s, p);
    const double fd_theta = (up.theta - dn.theta) / (2.0 * h);
    const double fd_x = (up.x - dn.x) / (2.0 * h);
    const double fd_y = (up.y - dn.y) / (2.0 * h);

    int sign_theta, sign_x, sign_y;
    std::optional<double> thr_price, thr_invest;
    if (v <= 0.0) {
        sign_theta = 1;
        sign_x = -1;
        sign_y = -1;
    } else {
        const double K = zero_underwriting_correlation(p);
        const double H = zero_investment_correlation(s, p);
        const double disc = std::exp(-p.r * (p.T - s));
        // Inside the regime H - v > 0 and 1 - v/K > 0, so both
        // thresholds are positive and well defined. The price threshold
        // is equivalent to sign(H - 2v + v^2/K); the investment one
        // comes from differentiating y* directly,
        //   dy*/dv < 0  <=>  2(gamma/alpha) v (H - v)
        //                      < (gamma/alpha)(1 - v^2) + e^{-r(T-s)},
        // rearranged into the same v-vs-threshold form.
        thr_price = (H - v) / (1.0 - v / K);
        thr_invest =
            ((1.0 - v * v) + p.alpha / p.gamma * disc) / (2.0 * (H - v));
        sign_theta = sign_of_comparison(v, *thr_price);
        sign_x = -sign_theta;
        sign_y = -sign_of_comparison(v, *thr_invest);
    }

    return {SensitivityReport{StaticsQuantity::Price,
                              StaticsDriver::UpperCorrelation, sign_theta,
                              fd_theta, thr_price},
            SensitivityReport{StaticsQuantity::Underwriting,
                              StaticsDriver::UpperCorrelation, sign_x, fd_x,
                              thr_price},
            SensitivityReport{StaticsQuantity::Investment,
                              StaticsDriver::UpperCorrelation, sign_y, fd_y,
                              thr_invest}};
}

std::array<SensitivityReport, 3> lower_regime_signs(double s,
                                                    const MarketParams& p,
                                                    const AmbiguityBand& band) {
    require_regime(classify_regime(s, p, band),
                   EquilibriumRegime::LowerBoundDistorted);
    const double w = band.lower();
    const double h = kStaticsFdStep;
    const auto up = distorted_equilibrium(w + h, s, p);
    const auto dn = distorted_equilibrium(w - h, s, p);
    return {SensitivityReport{StaticsQuantity::Price,
                              StaticsDriver::LowerCorrelation, -1,
                              (up.theta - dn.theta) / (2.0 * h), {}},
            SensitivityReport{StaticsQuantity::Underwriting,
                              StaticsDriver::LowerCorrelation, 1,
                              (up.x - dn.x) / (2.0 * h), {}},
            SensitivityReport{StaticsQuantity::Investment,
                              StaticsDriver::LowerCorrelation, -1,
                              (up.y - dn.y) / (2.0 * h), {}}};
}

namespace {

struct EqTriple {
    double theta, x, y;
};

// Equilibrium quantities for the pinned regime, with mu shifted so that
// the Sharpe ratio moves by exactly d_sharpe (sigma fixed).
EqTriple regime_closed_form(EquilibriumRegime regime, double s,
                            const MarketParams& p, const AmbiguityBand& band,
                            double d_sharpe) {
    const MarketParams q(p.l, p.eta, p.r, p.mu + d_sharpe * p.sigma, p.sigma,
                         p.alpha, p.gamma, p.t0, p.T);
    const double disc = std::exp(-q.r * (q.T - s));
    switch (regime) {
        case EquilibriumRegime::ZeroUnderwriting:
            return {price_upper_bound(q), 0.0,
                    (q.mu - q.r) / (q.gamma * q.sigma * q.sigma) * disc};
        case EquilibriumRegime::UpperBoundDistorted: {
            const auto eq = distorted_equilibrium(band.upper(), s, q);
            return {eq.theta, eq.x, eq.y};
        }
        case EquilibriumRegime::LowerBoundDistorted: {
            const auto eq = distorted_equilibrium(band.lower(), s, q);
            return {eq.theta, eq.x, eq.y};
        }
        case EquilibriumRegime::PureUnderwriting:
            return {pure_underwriting_price(s, q),
                    disc / q.gamma / (1.0 / q.alpha + disc / q.gamma), 0.0};
        case EquilibriumRegime::MarketFailure:
            break;
    }
    throw std::invalid_argument(
        "Sharpe sensitivities are undefined in the market-failure regime");
}

}  // namespace

std::array<SensitivityReport, 3> sharpe_signs(double s, const MarketParams& p,
                                              const AmbiguityBand& band) {
    const EquilibriumRegime regime = classify_regime(s, p, band);
    const double h = kStaticsFdStep;
    const auto up = regime_closed_form(regime, s, p, band, h);
    const auto dn = regime_closed_form(regime, s, p, band, -h);
    const double fd_theta = (up.theta - dn.theta) / (2.0 * h);
    const double fd_x = (up.x - dn.x) / (2.0 * h);
    const double fd_y = (up.y - dn.y) / (2.0 * h);

    int sign_theta = 0, sign_x = 0, sign_y = 0;
    switch (regime) {
        case EquilibriumRegime::ZeroUnderwriting:
            sign_y = 1;
            break;
        case EquilibriumRegime::UpperBoundDistorted: {
            const double v = band.upper();
            sign_theta = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
            sign_x = -sign_theta;
            sign_y = 1;
            break;
        }
        case EquilibriumRegime::LowerBoundDistorted:
            sign_theta = 1;
            sign_x = -1;
            sign_y = 1;
            break;
        case EquilibriumRegime::PureUnderwriting:
            break;
        case EquilibriumRegime::MarketFailure:
            throw std::invalid_argument(
                "Sharpe sensitivities are undefined in the market-failure "
                "regime");
    }

    return {SensitivityReport{StaticsQuantity::Price,
                              StaticsDriver::SharpeRatio, sign_theta, fd_theta,
                              {}},
            SensitivityReport{StaticsQuantity::Underwriting,
                              StaticsDriver::SharpeRatio, sign_x, fd_x, {}},
            SensitivityReport{StaticsQuantity::Investment,
                              StaticsDriver::SharpeRatio, sign_y, fd_y, {}}};
}

}  // namespace ambieq
