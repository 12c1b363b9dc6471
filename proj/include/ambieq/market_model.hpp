#pragma once

#include <stdexcept>
#include <vector>

namespace ambieq {

/// Exogenous constants of the insurance and financial markets, the two
/// agents' CARA risk aversions, and the planning horizon. All rates are
/// per year; times are in years. Validated once at construction;
/// operations may assume the invariants afterwards.
struct MarketParams {
    double l;      ///< expected instantaneous loss rate (> 0)
    double eta;    ///< loss volatility (> 0)
    double r;      ///< risk-free rate
    double mu;     ///< risky-asset drift (> r)
    double sigma;  ///< risky-asset volatility (> 0)
    double alpha;  ///< policyholder absolute risk aversion (> 0)
    double gamma;  ///< insurer absolute risk aversion (> 0)
    double t0;     ///< decision start time
    double T;      ///< horizon end time (> t0)

    MarketParams(double l, double eta, double r, double mu, double sigma,
                 double alpha, double gamma, double t0, double T);
};

/// Reference correlation plus ambiguity radius. Admissibility requires
/// both rho+phi and rho-phi to stay strictly inside (-1, 1) with margin
/// kAdmissibilityMargin; violations are construction errors, never
/// silent clipping. clamped() is the explicit opt-in that shrinks phi
/// instead and marks the result.
struct AmbiguityBand {
    double rho;
    double phi;
    bool clipped = false;  ///< true iff phi was reduced by clamped()

    static constexpr double kAdmissibilityMargin = 1e-9;

    AmbiguityBand(double rho, double phi);

    /// Largest admissible phi for a given rho.
    static double max_phi(double rho);

    /// Builds a band with phi clipped down to the admissible maximum.
    static AmbiguityBand clamped(double rho, double phi);

    double upper() const { return rho + phi; }  ///< rho + phi
    double lower() const { return rho - phi; }  ///< rho - phi
};

/// Regulatory loading-factor bounds: [0, alpha*eta^2/l].
struct PriceBounds {
    double lower;
    double upper;
};

/// Strictly increasing sequence of decision times.
class TimeGrid {
  public:
    explicit TimeGrid(std::vector<double> times);

    /// Inclusive regular grid start, start+step, ..., stop. The last
    /// point is forced to stop exactly when step does not divide the
    /// span to within 1e-9.
    static TimeGrid regular(double start, double stop, double step);

    const std::vector<double>& times() const { return times_; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }

  private:
    std::vector<double> times_;
};

double price_upper_bound(const MarketParams& p);
PriceBounds price_bounds(const MarketParams& p);

/// Policyholder demand 1 - theta*l/(alpha*eta^2). Throws std::domain_error
/// naming the violated bound when theta is outside [0, alpha*eta^2/l].
double demand(double theta, const MarketParams& p);

/// Relative profitability of underwriting vs investment:
/// psi = (theta*l/eta) * (sigma/(mu-r)). Requires theta >= 0.
double profitability_psi(double theta, const MarketParams& p);

/// (mu - r) / sigma.
double sharpe_ratio(const MarketParams& p);

}  // namespace ambieq
