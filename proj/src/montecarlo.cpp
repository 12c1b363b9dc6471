#include "ambieq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ambieq/calibration.hpp"
#include "ambieq/robust_strategy.hpp"

namespace ambieq {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index * 0x9E3779B97F4A7C15ULL + 1));
}

double standard_normal(SplitMix64& rng) {
    return normal_quantile(rng.uniform01());
}

std::pair<double, double> correlated_increments(double xi,
                                                const AmbiguityBand& band,
                                                double dt, SplitMix64& rng) {
    const double rho_xi = band.rho + xi;
    if (std::abs(rho_xi) > 1.0) {
        throw std::domain_error("effective correlation |rho + xi| exceeds 1");
    }
    const double sqrt_dt = std::sqrt(dt);
    const double z1 = standard_normal(rng);
    const double z2 = standard_normal(rng);
    const double dwi = sqrt_dt * z1;
    const double dws =
        rho_xi * dwi + std::sqrt(1.0 - rho_xi * rho_xi) * sqrt_dt * z2;
    return {dwi, dws};
}

namespace {

std::size_t step_count(double span, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    const auto n = static_cast<long long>(std::llround(span / dt));
    if (n < 1 || std::abs(double(n) * dt - span) > dt * (1.0 + 1e-9)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " does not divide the horizon " << span
            << " to within one step";
        throw std::invalid_argument(msg.str());
    }
    return static_cast<std::size_t>(n);
}

void validate_config(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

int resolve_threads(const SimConfig& cfg, std::int64_t n_paths) {
    int t = cfg.threads > 0 ? cfg.threads
                            : int(std::thread::hardware_concurrency());
    if (t < 1) t = 1;
    return int(std::min<std::int64_t>(t, n_paths));
}

}  // namespace

ControlPath equilibrium_control_path(const MarketParams& p,
                                     const AmbiguityBand& band, double dt) {
    const std::size_t n = step_count(p.T - p.t0, dt);
    ControlPath cp;
    cp.t0 = p.t0;
    cp.dt = dt;
    cp.x.reserve(n);
    cp.y.reserve(n);
    cp.theta.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = p.t0 + double(k) * dt;
        const EquilibriumPoint pt = equilibrium_point(s, p, band);
        if (pt.regime == EquilibriumRegime::MarketFailure) {
            std::ostringstream msg;
            msg << "market failure at s = " << s
                << "; no equilibrium controls exist";
            throw std::invalid_argument(msg.str());
        }
        cp.x.push_back(*pt.x_star);
        cp.y.push_back(*pt.y_star);
        cp.theta.push_back(*pt.theta_star);
    }
    return cp;
}

namespace {

// Per-step constants of the wealth recursion.
struct StepCoeffs {
    double drift_dt;  // (x theta l + y (mu - r)) dt
    double ax;        // x eta sqrt(dt)
    double by;        // y sigma sqrt(dt)
};

std::vector<StepCoeffs> make_step_coeffs(const ControlPath& cp,
                                         const MarketParams& p) {
    const double sqrt_dt = std::sqrt(cp.dt);
    std::vector<StepCoeffs> coeffs(cp.n_steps());
    for (std::size_t k = 0; k < cp.n_steps(); ++k) {
        coeffs[k] = {
            (cp.x[k] * cp.theta[k] * p.l + cp.y[k] * (p.mu - p.r)) * cp.dt,
            cp.x[k] * p.eta * sqrt_dt,
            cp.y[k] * p.sigma * sqrt_dt,
        };
    }
    return coeffs;
}

}  // namespace

std::vector<std::vector<double>> simulate_terminal_wealth_multi(
    const ControlPath& controls, std::span<const double> xis,
    const MarketParams& p, const AmbiguityBand& band,
    const SimConfig& config) {
    validate_config(config);
    if (controls.n_steps() == 0 || controls.y.size() != controls.n_steps() ||
        controls.theta.size() != controls.n_steps()) {
        throw std::invalid_argument(
            "control path does not cover the simulation grid");
    }
    if (xis.empty()) throw std::invalid_argument("xi list must be non-empty");

    const std::size_t n_xi = xis.size();
    std::vector<double> corr(n_xi), ortho(n_xi);
    for (std::size_t j = 0; j < n_xi; ++j) {
        if (std::abs(xis[j]) > band.phi + 1e-12) {
            throw std::domain_error("xi outside the ambiguity set");
        }
        const double rho_xi = band.rho + xis[j];
        if (std::abs(rho_xi) > 1.0) {
            throw std::domain_error(
                "effective correlation |rho + xi| exceeds 1");
        }
        corr[j] = rho_xi;
        ortho[j] = std::sqrt(1.0 - rho_xi * rho_xi);
    }

    const auto coeffs = make_step_coeffs(controls, p);
    const double r_dt = p.r * controls.dt;
    const auto n_paths = static_cast<std::size_t>(config.n_paths);

    std::vector<std::vector<double>> terminal(n_xi,
                                              std::vector<double>(n_paths));

    const auto run_block = [&](std::size_t begin, std::size_t end) {
        std::vector<double> m(n_xi);
        for (std::size_t path = begin; path < end; ++path) {
            SplitMix64 rng(substream_seed(config.seed, path));
            std::fill(m.begin(), m.end(), config.m0);
            for (const StepCoeffs& c : coeffs) {
                const double z1 = normal_quantile(rng.uniform01());
                const double z2 = normal_quantile(rng.uniform01());
                for (std::size_t j = 0; j < n_xi; ++j) {
                    m[j] += c.drift_dt + m[j] * r_dt + c.ax * z1 +
                            c.by * (corr[j] * z1 + ortho[j] * z2);
                }
            }
            for (std::size_t j = 0; j < n_xi; ++j) terminal[j][path] = m[j];
        }
    };

    const int n_threads = resolve_threads(config, config.n_paths);
    if (n_threads <= 1) {
        run_block(0, n_paths);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(std::size_t(n_threads));
        const std::size_t chunk = (n_paths + std::size_t(n_threads) - 1) /
                                  std::size_t(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t begin = std::size_t(t) * chunk;
            const std::size_t end = std::min(begin + chunk, n_paths);
            if (begin >= end) break;
            workers.emplace_back(run_block, begin, end);
        }
        for (auto& w : workers) w.join();
    }
    return terminal;
}

std::vector<double> simulate_terminal_wealth(const ControlPath& controls,
                                             double xi, const MarketParams& p,
                                             const AmbiguityBand& band,
                                             const SimConfig& config) {
    const double xis[] = {xi};
    auto result = simulate_terminal_wealth_multi(controls, xis, p, band,
                                                 config);
    return std::move(result.front());
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 32) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

struct SampleStats {
    double mean;
    double std_error;
};

SampleStats utility_stats(std::span<const double> utilities) {
    const double n = double(utilities.size());
    const double mean = pairwise_sum(utilities) / n;
    std::vector<double> sq(utilities.size());
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        const double d = utilities[i] - mean;
        sq[i] = d * d;
    }
    const double var =
        utilities.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

std::vector<double> cara_utilities(std::span<const double> terminal,
                                   double gamma) {
    std::vector<double> u(terminal.size());
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        u[i] = -std::exp(-gamma * terminal[i]) / gamma;
    }
    return u;
}

// The regime must not switch inside the horizon; reports the first
// switch time if it does.
void require_constant_regime(const MarketParams& p, const AmbiguityBand& band,
                             double dt) {
    const EquilibriumRegime first = classify_regime(p.t0, p, band);
    const std::size_t n = step_count(p.T - p.t0, dt);
    double prev = p.t0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double s = std::min(p.t0 + double(k) * dt, p.T);
        if (classify_regime(s, p, band) != first) {
            double lo = prev, hi = s;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                (classify_regime(mid, p, band) == first ? lo : hi) = mid;
            }
            std::ostringstream msg;
            msg << "equilibrium regime switches at s = " << 0.5 * (lo + hi)
                << "; value-function verification requires a constant regime";
            throw std::invalid_argument(msg.str());
        }
        prev = s;
    }
}

double closed_form_value(const MarketParams& p, const AmbiguityBand& band,
                         double m0) {
    const auto theta_of_s = [&](double s) {
        return *equilibrium_point(s, p, band).theta_star;
    };
    const double p_integral =
        integrate_utility_gain(theta_of_s, p.t0, p.T, p, band);
    return value_function({p.t0, m0, p_integral}, p);
}

}  // namespace

PathStats verify_value_function(const MarketParams& p,
                                const AmbiguityBand& band,
                                const SimConfig& config) {
    validate_config(config);
    require_constant_regime(p, band, config.dt);

    const EquilibriumPoint start = equilibrium_point(p.t0, p, band);
    const double xi_star = *start.xi_star;
    const ControlPath controls = equilibrium_control_path(p, band, config.dt);
    const auto terminal =
        simulate_terminal_wealth(controls, xi_star, p, band, config);
    const auto utilities = cara_utilities(terminal, p.gamma);
    const auto stats = utility_stats(utilities);

    PathStats out{};
    out.mean_utility = stats.mean;
    out.std_error = stats.std_error;
    out.v_closed_form = closed_form_value(p, band, config.m0);
    out.z_score = (out.mean_utility - out.v_closed_form) / out.std_error;
    out.n_paths = config.n_paths;
    out.dt = config.dt;
    out.seed = config.seed;
    out.xi = xi_star;
    return out;
}

PathStats piecewise_value_probe(const MarketParams& p,
                                const AmbiguityBand& band,
                                const SimConfig& config) {
    validate_config(config);
    const ControlPath controls = equilibrium_control_path(p, band, config.dt);
    const std::size_t n_steps = controls.n_steps();

    // Pointwise worst-case correlation and the regime switch times.
    std::vector<double> corr(n_steps), ortho(n_steps);
    std::vector<double> switch_times;
    EquilibriumRegime prev_regime{};
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double s = p.t0 + double(k) * config.dt;
        const EquilibriumPoint pt = equilibrium_point(s, p, band);
        const double rho_xi = band.rho + *pt.xi_star;
        corr[k] = rho_xi;
        ortho[k] = std::sqrt(std::max(0.0, 1.0 - rho_xi * rho_xi));
        if (k > 0 && pt.regime != prev_regime) {
            double lo = s - config.dt, hi = s;
            while (hi - lo > 1e-8) {
                const double mid = 0.5 * (lo + hi);
                (classify_regime(mid, p, band) == prev_regime ? lo : hi) = mid;
            }
            switch_times.push_back(0.5 * (lo + hi));
        }
        prev_regime = pt.regime;
    }

    const auto coeffs = make_step_coeffs(controls, p);
    const double r_dt = p.r * controls.dt;
    const auto n_paths = static_cast<std::size_t>(config.n_paths);
    std::vector<double> terminal(n_paths);

    const auto run_block = [&](std::size_t begin, std::size_t end) {
        for (std::size_t path = begin; path < end; ++path) {
            SplitMix64 rng(substream_seed(config.seed, path));
            double m = config.m0;
            for (std::size_t k = 0; k < n_steps; ++k) {
                const double z1 = normal_quantile(rng.uniform01());
                const double z2 = normal_quantile(rng.uniform01());
                m += coeffs[k].drift_dt + m * r_dt + coeffs[k].ax * z1 +
                     coeffs[k].by * (corr[k] * z1 + ortho[k] * z2);
            }
            terminal[path] = m;
        }
    };
    const int n_threads = resolve_threads(config, config.n_paths);
    if (n_threads <= 1) {
        run_block(0, n_paths);
    } else {
        std::vector<std::thread> workers;
        const std::size_t chunk =
            (n_paths + std::size_t(n_threads) - 1) / std::size_t(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t begin = std::size_t(t) * chunk;
            const std::size_t end = std::min(begin + chunk, n_paths);
            if (begin >= end) break;
            workers.emplace_back(run_block, begin, end);
        }
        for (auto& w : workers) w.join();
    }

    const auto utilities = cara_utilities(terminal, p.gamma);
    const auto stats = utility_stats(utilities);
    const auto theta_of_s = [&](double s) {
        return *equilibrium_point(s, p, band).theta_star;
    };
    const double p_integral = integrate_utility_gain(
        theta_of_s, p.t0, p.T, p, band, switch_times);

    PathStats out{};
    out.mean_utility = stats.mean;
    out.std_error = stats.std_error;
    out.v_closed_form = value_function({p.t0, config.m0, p_integral}, p);
    out.z_score = (out.mean_utility - out.v_closed_form) / out.std_error;
    out.n_paths = config.n_paths;
    out.dt = config.dt;
    out.seed = config.seed;
    out.xi = *equilibrium_point(p.t0, p, band).xi_star;
    out.piecewise = true;
    return out;
}

std::vector<DominanceEntry> worst_case_dominance(const MarketParams& p,
                                                 const AmbiguityBand& band,
                                                 std::span<const double> xi_grid,
                                                 const SimConfig& config) {
    validate_config(config);
    require_constant_regime(p, band, config.dt);
    if (xi_grid.empty()) {
        throw std::invalid_argument("xi grid must be non-empty");
    }

    const EquilibriumPoint start = equilibrium_point(p.t0, p, band);
    const double xi_star = *start.xi_star;
    const ControlPath controls = equilibrium_control_path(p, band, config.dt);
    const auto terminal =
        simulate_terminal_wealth_multi(controls, xi_grid, p, band, config);

    std::vector<std::vector<double>> utilities(xi_grid.size());
    for (std::size_t j = 0; j < xi_grid.size(); ++j) {
        utilities[j] = cara_utilities(terminal[j], p.gamma);
    }

    // Reference column: the grid point closest to the analytic xi*.
    std::size_t star = 0;
    for (std::size_t j = 1; j < xi_grid.size(); ++j) {
        if (std::abs(xi_grid[j] - xi_star) < std::abs(xi_grid[star] - xi_star)) {
            star = j;
        }
    }

    std::vector<DominanceEntry> table(xi_grid.size());
    std::size_t minimum = 0;
    for (std::size_t j = 0; j < xi_grid.size(); ++j) {
        const auto stats = utility_stats(utilities[j]);
        table[j].xi = xi_grid[j];
        table[j].mean_utility = stats.mean;
        table[j].std_error = stats.std_error;
        if (j == star) {
            table[j].z_vs_star = 0.0;
        } else {
            std::vector<double> diff(utilities[j].size());
            for (std::size_t i = 0; i < diff.size(); ++i) {
                diff[i] = utilities[j][i] - utilities[star][i];
            }
            const auto diff_stats = utility_stats(diff);
            table[j].z_vs_star = diff_stats.std_error > 0.0
                                     ? diff_stats.mean / diff_stats.std_error
                                     : 0.0;
        }
        if (table[j].mean_utility < table[minimum].mean_utility) minimum = j;
    }
    table[minimum].is_grid_minimum = true;
    return table;
}

}  // namespace ambieq
