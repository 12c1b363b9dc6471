#include "ambieq/market_model.hpp"

#include <cmath>
#include <string>

namespace ambieq {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

MarketParams::MarketParams(double l_, double eta_, double r_, double mu_,
                           double sigma_, double alpha_, double gamma_,
                           double t0_, double T_)
    : l(l_), eta(eta_), r(r_), mu(mu_), sigma(sigma_), alpha(alpha_),
      gamma(gamma_), t0(t0_), T(T_) {
    require(std::isfinite(l) && l > 0.0, "l must be > 0");
    require(std::isfinite(eta) && eta > 0.0, "eta must be > 0");
    require(std::isfinite(r), "r must be finite");
    require(std::isfinite(mu) && mu > r, "mu must exceed r");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0");
    require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
    require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
    require(std::isfinite(t0) && std::isfinite(T) && T > t0,
            "horizon T must exceed start time t0");
}

AmbiguityBand::AmbiguityBand(double rho_, double phi_) : rho(rho_), phi(phi_) {
    require(std::isfinite(rho) && std::abs(rho) < 1.0,
            "rho must lie in (-1, 1)");
    require(std::isfinite(phi) && phi >= 0.0, "phi must be >= 0");
    if (std::abs(rho) + phi > 1.0 - kAdmissibilityMargin) {
        throw std::invalid_argument(
            "inadmissible ambiguity band: |rho| + phi = " +
            std::to_string(std::abs(rho) + phi) +
            " must stay below 1 - 1e-9; use AmbiguityBand::clamped to clip");
    }
}

double AmbiguityBand::max_phi(double rho) {
    double cap = 1.0 - kAdmissibilityMargin - std::abs(rho);
    // Rounding in the subtraction can leave |rho| + cap one ulp above
    // the admissibility line; nudge down until it is not.
    while (cap > 0.0 && std::abs(rho) + cap > 1.0 - kAdmissibilityMargin) {
        cap = std::nextafter(cap, 0.0);
    }
    return std::max(cap, 0.0);
}

AmbiguityBand AmbiguityBand::clamped(double rho, double phi) {
    require(std::isfinite(rho) && std::abs(rho) < 1.0 - kAdmissibilityMargin,
            "rho must lie strictly inside (-1, 1)");
    require(std::isfinite(phi) && phi >= 0.0, "phi must be >= 0");
    const double cap = max_phi(rho);
    if (phi <= cap) return AmbiguityBand(rho, phi);
    AmbiguityBand band(rho, cap);
    band.clipped = true;
    return band;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    require(!times_.empty(), "time grid must be non-empty");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require(std::isfinite(times_[i]), "time grid entries must be finite");
        if (i > 0) {
            require(times_[i] > times_[i - 1],
                    "time grid must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::regular(double start, double stop, double step) {
    require(std::isfinite(start) && std::isfinite(stop) && stop > start,
            "grid stop must exceed start");
    require(std::isfinite(step) && step > 0.0, "grid step must be > 0");
    std::vector<double> times;
    const auto n = static_cast<std::size_t>(
        std::floor((stop - start) / step + 1e-9));
    times.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) times.push_back(start + double(i) * step);
    if (times.back() < stop - 1e-9) {
        times.push_back(stop);
    } else {
        times.back() = stop;
    }
    return TimeGrid(std::move(times));
}

double price_upper_bound(const MarketParams& p) {
    return p.alpha * p.eta * p.eta / p.l;
}

PriceBounds price_bounds(const MarketParams& p) {
    return PriceBounds{0.0, price_upper_bound(p)};
}

double demand(double theta, const MarketParams& p) {
    const double upper = price_upper_bound(p);
    if (!(theta >= 0.0)) {
        throw std::domain_error("theta = " + std::to_string(theta) +
                                " violates the lower price bound 0");
    }
    if (!(theta <= upper)) {
        throw std::domain_error("theta = " + std::to_string(theta) +
                                " violates the upper price bound " +
                                std::to_string(upper));
    }
    return 1.0 - theta * p.l / (p.alpha * p.eta * p.eta);
}

double profitability_psi(double theta, const MarketParams& p) {
    if (!(theta >= 0.0)) {
        throw std::domain_error("profitability ratio requires theta >= 0");
    }
    return (theta * p.l / p.eta) * (p.sigma / (p.mu - p.r));
}

double sharpe_ratio(const MarketParams& p) { return (p.mu - p.r) / p.sigma; }

}  // namespace ambieq
