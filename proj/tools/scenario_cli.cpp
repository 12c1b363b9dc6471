// Command-line front end: scenario orchestration, calibration, regime
// sweeps and the verification reports, exporting CSV/JSON for external
// plotting.

#include <atomic>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ambieq/calibration.hpp"
#include "ambieq/scenario.hpp"
#include "ambieq/text_format.hpp"

namespace {

struct GlobalOptions {
    std::string out_dir = "out";
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    int jobs = 1;

    ambieq::RunOptions run_options() const {
        ambieq::RunOptions opts;
        opts.out_dir = out_dir;
        opts.format = format == "json" ? ambieq::OutputFormat::Json
                                       : ambieq::OutputFormat::Csv;
        if (seed_set) opts.seed_override = seed;
        opts.threads = threads;
        return opts;
    }
};

void add_global_options(CLI::App& app, GlobalOptions& g) {
    app.add_option("--out", g.out_dir, "output directory")
        ->envname("AMBIEQ_OUT");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->envname("AMBIEQ_FORMAT");
    app.add_option("--seed", g.seed, "override the Monte Carlo seed")
        ->envname("AMBIEQ_SEED");
    app.add_option("--threads", g.threads,
                   "worker threads per simulation (0 = hardware)")
        ->envname("AMBIEQ_THREADS");
    app.add_option("--jobs", g.jobs, "scenarios run in parallel")
        ->envname("AMBIEQ_JOBS")
        ->check(CLI::PositiveNumber);
}

// Runs a batch of configs through run_scenario in a small worker pool;
// manifest assembly stays single-threaded.
int run_batch(const std::vector<std::string>& configs, const GlobalOptions& g,
              std::optional<std::vector<ambieq::Artifact>> artifact_override) {
    std::vector<ambieq::Scenario> scenarios;
    scenarios.reserve(configs.size());
    std::set<std::string> names;
    for (const auto& file : configs) {
        scenarios.push_back(ambieq::load_scenario(file));
        if (!names.insert(scenarios.back().name).second) {
            throw std::invalid_argument("duplicate scenario name '" +
                                        scenarios.back().name +
                                        "' in batch; output files would clash");
        }
    }

    ambieq::RunOptions opts = g.run_options();
    opts.artifact_override = std::move(artifact_override);

    std::vector<ambieq::RunManifest> manifests(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());
    const int jobs =
        std::max(1, std::min<int>(g.jobs, int(scenarios.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            manifests[i] = ambieq::run_scenario(scenarios[i], opts);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < scenarios.size(); i = next++) {
                try {
                    manifests[i] = ambieq::run_scenario(scenarios[i], opts);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    const auto manifest_file = ambieq::write_manifest(manifests, opts.out_dir);
    std::cout << "wrote " << manifest_file.string() << " ("
              << scenarios.size() << " scenario"
              << (scenarios.size() == 1 ? "" : "s") << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "robust insurance-market equilibrium engine under correlation "
        "ambiguity"};
    app.require_subcommand(1);

    GlobalOptions g;
    add_global_options(app, g);
    // Let global flags appear after the subcommand name as well.
    app.fallthrough();

    std::vector<std::string> configs;
    const auto add_config_option = [&](CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--config", configs,
                                    "scenario config file(s)");
        opt->check(CLI::ExistingFile);
        if (required) opt->required();
    };

    auto* cmd_run = app.add_subcommand(
        "run", "produce every artifact a scenario requests");
    add_config_option(cmd_run);

    auto* cmd_path = app.add_subcommand(
        "path", "equilibrium price/position paths with switch times");
    add_config_option(cmd_path);

    auto* cmd_statics = app.add_subcommand(
        "statics", "comparative-statics sign report with FD checks");
    add_config_option(cmd_statics);

    auto* cmd_verify = app.add_subcommand(
        "verify", "saddle-oracle and HJBI-residual verification report");
    add_config_option(cmd_verify);

    auto* cmd_mc = app.add_subcommand(
        "mc", "Monte Carlo value-function verification");
    add_config_option(cmd_mc);

    auto* cmd_calibrate = app.add_subcommand(
        "calibrate", "Fisher-interval ambiguity radius");
    double rho_hat = 0.0;
    int n_obs = 30;
    double confidence = 0.95;
    bool grid = false;
    add_config_option(cmd_calibrate, false);
    cmd_calibrate->add_option("--rho-hat", rho_hat, "sample correlation");
    cmd_calibrate->add_option("--n", n_obs, "observation count");
    cmd_calibrate->add_option("--confidence", confidence, "coverage level");
    cmd_calibrate->add_flag("--grid", grid,
                            "also write the rho x confidence radius grid");

    auto* cmd_sweep = app.add_subcommand(
        "sweep", "regime map over a (rho, phi) rectangle");
    ambieq::SweepSpec sweep;
    add_config_option(cmd_sweep);
    cmd_sweep->add_option("--rho-min", sweep.rho_min);
    cmd_sweep->add_option("--rho-max", sweep.rho_max);
    cmd_sweep->add_option("--rho-steps", sweep.rho_steps);
    cmd_sweep->add_option("--phi-min", sweep.phi_min);
    cmd_sweep->add_option("--phi-max", sweep.phi_max);
    cmd_sweep->add_option("--phi-steps", sweep.phi_steps);
    cmd_sweep->add_option("--times", sweep.times,
                          "evaluation times (default: t0)");

    CLI11_PARSE(app, argc, argv);
    g.seed_set = app.count("--seed") > 0;

    try {
        if (cmd_run->parsed()) return run_batch(configs, g, std::nullopt);
        if (cmd_path->parsed()) {
            return run_batch(configs, g,
                             std::vector{ambieq::Artifact::Path});
        }
        if (cmd_statics->parsed()) {
            return run_batch(configs, g,
                             std::vector{ambieq::Artifact::Statics});
        }
        if (cmd_verify->parsed()) {
            return run_batch(configs, g,
                             std::vector{ambieq::Artifact::Verify});
        }
        if (cmd_mc->parsed()) {
            return run_batch(configs, g, std::vector{ambieq::Artifact::Mc});
        }
        if (cmd_calibrate->parsed()) {
            if (!configs.empty()) {
                return run_batch(configs, g,
                                 std::vector{ambieq::Artifact::CalibrateGrid});
            }
            const ambieq::CalibratedBand cal = ambieq::ambiguity_radius(
                ambieq::CalibrationInput(rho_hat, n_obs, confidence));
            std::cout << "rho_hat = " << ambieq::format_float(cal.rho) << "\n"
                      << "phi = " << ambieq::format_float(cal.phi) << "\n"
                      << "rho_lo = " << ambieq::format_float(cal.rho_lo) << "\n"
                      << "rho_hi = " << ambieq::format_float(cal.rho_hi) << "\n"
                      << "admissible = " << (cal.admissible ? "true" : "false")
                      << "\n";
            if (grid) {
                const auto file = ambieq::write_calibration_grid(
                    n_obs, g.out_dir, "calibration_grid",
                    g.run_options().format);
                std::cout << "wrote " << file.string() << "\n";
            }
            return 0;
        }
        if (cmd_sweep->parsed()) {
            const ambieq::Scenario scenario =
                ambieq::load_scenario(configs.front());
            const auto file =
                ambieq::run_sweep(scenario, sweep, g.run_options());
            std::cout << "wrote " << file.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        // Machine-readable error record; exit code contract: nonzero on
        // any failure, regime failures inside a scenario are data.
        nlohmann::ordered_json record{{"error", e.what()},
                                      {"tool_version", ambieq::kToolVersion}};
        std::cerr << record.dump() << "\n";
        return 1;
    }
    return 0;
}
