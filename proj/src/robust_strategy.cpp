#include "ambieq/robust_strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ambieq {

const char* to_string(StrategyCase c) {
    switch (c) {
        case StrategyCase::ZeroUnderwriting: return "zero_underwriting";
        case StrategyCase::UpperDistortion: return "upper_distortion";
        case StrategyCase::LowerDistortion: return "lower_distortion";
        case StrategyCase::ZeroInvestment: return "zero_investment";
    }
    return "?";
}

std::array<bool, 4> strategy_case_conditions(double rho, double phi,
                                             double psi) {
    const double inv = 1.0 / psi;  // +inf at psi = 0; the comparisons below
                                   // then evaluate the way the limits do
    return {
        phi >= psi - rho,
        phi < psi - rho && phi < inv - rho,
        rho - psi < phi && phi < rho - inv,
        phi >= inv - rho && phi >= rho - inv,
    };
}

StrategyCase classify_strategy_case(double rho, double phi, double psi) {
    if (!(psi >= 0.0)) {
        throw std::domain_error("profitability ratio psi must be >= 0");
    }
    if (phi >= psi - rho) return StrategyCase::ZeroUnderwriting;
    if (psi == 0.0) {
        // Unreachable for admissible inputs (psi = 0 makes the first
        // condition phi >= -rho hold whenever rho > -phi), but guard
        // against the undefined psi^{-1}.
        throw std::domain_error(
            "degenerate profitability: psi = 0 with phi < -rho leaves "
            "psi^{-1} undefined");
    }
    const double inv = 1.0 / psi;
    if (phi < inv - rho) return StrategyCase::UpperDistortion;
    if (rho - psi < phi && phi < rho - inv) return StrategyCase::LowerDistortion;
    if (phi >= inv - rho && phi >= rho - inv) return StrategyCase::ZeroInvestment;
    throw std::logic_error(
        "strategy case conditions do not partition at rho=" +
        std::to_string(rho) + " phi=" + std::to_string(phi) +
        " psi=" + std::to_string(psi));
}

bool near_strategy_boundary(double rho, double phi, double psi, double tol) {
    if (std::abs(phi - (psi - rho)) <= tol) return true;
    if (psi > 0.0) {
        const double inv = 1.0 / psi;
        if (std::abs(phi - (inv - rho)) <= tol) return true;
        if (std::abs(phi - (rho - inv)) <= tol) return true;
        if (std::abs(phi - (rho - psi)) <= tol) return true;
    }
    return false;
}

double discount_factor(double s, const MarketParams& p) {
    if (!(s <= p.T)) {
        throw std::domain_error("discount_factor requires s <= T");
    }
    return std::exp(-p.r * (p.T - s));
}

namespace {

// x and y of the correlation-distorted closed form at effective
// correlation v (= rho+phi or rho-phi).
struct DistortedControls {
    double x;
    double y;
    double p_rate;
};

DistortedControls distorted_controls(double v, double theta, double disc,
                                     const MarketParams& p) {
    const double excess = p.mu - p.r;
    const double denom = p.gamma * (1.0 - v * v);
    const double a = theta * p.l * p.sigma;     // underwriting gain scale
    const double b = excess * p.eta;            // investment gain scale
    DistortedControls out;
    out.x = (a - v * b) * disc / (denom * p.eta * p.eta * p.sigma);
    out.y = (b - v * a) * disc / (denom * p.eta * p.sigma * p.sigma);
    out.p_rate = (a * a - 2.0 * v * a * b + b * b) /
                 (2.0 * (1.0 - v * v) * p.eta * p.eta * p.sigma * p.sigma);
    return out;
}

}  // namespace

OptimalControl optimal_control_cara(double theta, double s,
                                    const MarketParams& p,
                                    const AmbiguityBand& band) {
    if (!(theta > 0.0)) {
        throw std::invalid_argument(
            "optimal_control_cara requires theta > 0");
    }
    if (!(s >= p.t0 && s <= p.T)) {
        throw std::invalid_argument("time s must lie in [t0, T]");
    }
    const double psi = profitability_psi(theta, p);
    const double disc = discount_factor(s, p);
    const double excess = p.mu - p.r;

    OptimalControl out{};
    out.strategy_case = classify_strategy_case(band.rho, band.phi, psi);
    out.near_boundary = near_strategy_boundary(band.rho, band.phi, psi);

    switch (out.strategy_case) {
        case StrategyCase::ZeroUnderwriting: {
            out.x = 0.0;
            out.y = excess / (p.gamma * p.sigma * p.sigma) * disc;
            const double raw_lo = psi - band.rho;
            out.xi_interval_clipped = raw_lo < -band.phi;
            out.xi_lo = std::max(raw_lo, -band.phi);
            out.xi_hi = band.phi;
            out.xi_star = out.xi_lo;  // minimal admissible distortion
            out.p_rate = excess * excess / (2.0 * p.sigma * p.sigma);
            break;
        }
        case StrategyCase::UpperDistortion: {
            const auto c = distorted_controls(band.upper(), theta, disc, p);
            out.x = c.x;
            out.y = c.y;
            out.xi_star = out.xi_lo = out.xi_hi = band.phi;
            out.p_rate = c.p_rate;
            break;
        }
        case StrategyCase::LowerDistortion: {
            const auto c = distorted_controls(band.lower(), theta, disc, p);
            out.x = c.x;
            out.y = c.y;
            out.xi_star = out.xi_lo = out.xi_hi = -band.phi;
            out.p_rate = c.p_rate;
            break;
        }
        case StrategyCase::ZeroInvestment: {
            out.x = theta * p.l / (p.gamma * p.eta * p.eta) * disc;
            out.y = 0.0;
            out.xi_star = out.xi_lo = out.xi_hi = 1.0 / psi - band.rho;
            out.p_rate =
                theta * theta * p.l * p.l / (2.0 * p.eta * p.eta);
            break;
        }
    }
    return out;
}

double utility_gain_rate(double theta, double s, const MarketParams& p,
                         const AmbiguityBand& band) {
    return optimal_control_cara(theta, s, p, band).p_rate;
}

double value_function(const ValueFunctionParams& vp, const MarketParams& p) {
    const double growth = std::exp(p.r * (p.T - vp.t));
    return -std::exp(-p.gamma * vp.m * growth - vp.p_integral) / p.gamma;
}

namespace {

double simpson_segment(const std::function<double(double)>& f, double a,
                       double b, double max_step) {
    auto n = static_cast<std::size_t>(std::ceil((b - a) / max_step));
    n = std::max<std::size_t>(n, 2);
    if (n % 2 != 0) ++n;
    const double h = (b - a) / double(n);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        acc += f(a + double(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace

double integrate_utility_gain(const std::function<double(double)>& theta_of_s,
                              double t, double t_end, const MarketParams& p,
                              const AmbiguityBand& band,
                              std::span<const double> split_times,
                              double max_step) {
    if (!(t_end >= t)) {
        throw std::invalid_argument("integration range must satisfy t_end >= t");
    }
    if (t_end == t) return 0.0;
    std::vector<double> knots{t};
    for (double split : split_times) {
        if (split > t && split < t_end) knots.push_back(split);
    }
    knots.push_back(t_end);
    std::sort(knots.begin(), knots.end());

    const auto integrand = [&](double s) {
        return utility_gain_rate(theta_of_s(s), s, p, band);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i + 1] - knots[i] < 1e-14) continue;
        total += simpson_segment(integrand, knots[i], knots[i + 1], max_step);
    }
    return total;
}

}  // namespace ambieq
