#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ambieq/calibration.hpp"
#include "ambieq/market_model.hpp"
#include "ambieq/montecarlo.hpp"

namespace ambieq {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Artifact { Path, Statics, Verify, Mc, CalibrateGrid };

const char* to_string(Artifact a);
std::optional<Artifact> artifact_from_string(std::string_view name);

/// Monte Carlo settings of a scenario ([mc] section).
struct McSettings {
    std::int64_t n_paths = 100000;
    double dt = 0.005;
    std::uint64_t seed = 42;
    double m0 = 0.0;
};

/// Regular reporting grid, serialisable as (start, stop, step).
struct ReportGrid {
    double start;
    double stop;
    double step;

    TimeGrid to_time_grid() const {
        return TimeGrid::regular(start, stop, step);
    }
};

/// A fully validated experiment description: market constants, the band
/// (explicit or Fisher-calibrated), the reporting grid and the artifact
/// set to produce.
struct Scenario {
    std::string name;
    MarketParams params;
    std::variant<AmbiguityBand, CalibrationInput> band_source;
    ReportGrid grid;
    std::vector<Artifact> outputs;  // non-empty, unique, canonical order
    McSettings mc;

    /// The band the equilibrium engine runs with. Throws when a
    /// calibrated band is inadmissible.
    AmbiguityBand resolved_band() const;
};

/// Config parse failure with source position.
struct ScenarioParseError : std::runtime_error {
    ScenarioParseError(const std::string& origin, int line, int col,
                       const std::string& what);
    int line;
    int col;
};

/// Parses the flat key/value + section config format. Unknown sections
/// or keys are rejected; every violated invariant is named.
Scenario parse_scenario(std::string_view text, const std::string& origin);

Scenario load_scenario(const std::filesystem::path& file);

/// Canonical config text; load_scenario(write_scenario(s)) == s. Also
/// the input of the config digest.
std::string write_scenario(const Scenario& s);

enum class OutputFormat { Csv, Json };

struct RunOptions {
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::uint64_t> seed_override;
    int threads = 0;
    /// When set, replaces the scenario's own artifact list (used by the
    /// per-artifact CLI subcommands).
    std::optional<std::vector<Artifact>> artifact_override;
};

/// Per-scenario run record.
struct RunManifest {
    std::string scenario_name;
    std::string tool_version;
    std::string config_digest;  // fnv1a64 hex of the canonical config text
    std::uint64_t seed;
    std::string rng_algorithm;  // pinned generator name/version
    std::string timestamp;
    std::vector<std::string> files;
};

/// Produces the requested artifact files under out_dir and returns the
/// manifest record. Market failure is data, not an error; malformed
/// inputs throw before any file is created.
RunManifest run_scenario(const Scenario& s, const RunOptions& opts);

/// Writes one manifest JSON for a batch of run records (single-threaded
/// assembly step).
std::filesystem::path write_manifest(const std::vector<RunManifest>& records,
                                     const std::filesystem::path& out_dir);

/// Regime map over a (rho, phi) rectangle at fixed times. Inadmissible
/// cells are skipped; the necessary-condition checklist is validated on
/// every classified cell.
struct SweepSpec {
    double rho_min = -0.9;
    double rho_max = 0.9;
    int rho_steps = 37;
    double phi_min = 0.0;
    double phi_max = 0.6;
    int phi_steps = 25;
    std::vector<double> times;  // defaults to {t0} when empty
};

std::filesystem::path run_sweep(const Scenario& s, const SweepSpec& sweep,
                                const RunOptions& opts);

/// Standalone calibration grid (rho in {-0.9..0.9 step 0.1} x confidence
/// in {0.80, 0.90, 0.95, 0.99}) for a given observation count.
std::filesystem::path write_calibration_grid(int n,
                                             const std::filesystem::path& out_dir,
                                             const std::string& stem,
                                             OutputFormat format);

}  // namespace ambieq
