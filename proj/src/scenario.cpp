#include "ambieq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ambieq/equilibrium.hpp"
#include "ambieq/saddle_oracle.hpp"
#include "ambieq/statics.hpp"
#include "ambieq/text_format.hpp"

namespace ambieq {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Artifact a) {
    switch (a) {
        case Artifact::Path: return "path";
        case Artifact::Statics: return "statics";
        case Artifact::Verify: return "verify";
        case Artifact::Mc: return "mc";
        case Artifact::CalibrateGrid: return "calibrate-grid";
    }
    return "?";
}

std::optional<Artifact> artifact_from_string(std::string_view name) {
    if (name == "path") return Artifact::Path;
    if (name == "statics") return Artifact::Statics;
    if (name == "verify") return Artifact::Verify;
    if (name == "mc") return Artifact::Mc;
    if (name == "calibrate-grid") return Artifact::CalibrateGrid;
    return std::nullopt;
}

AmbiguityBand Scenario::resolved_band() const {
    if (std::holds_alternative<AmbiguityBand>(band_source)) {
        return std::get<AmbiguityBand>(band_source);
    }
    const CalibratedBand cal =
        ambiguity_radius(std::get<CalibrationInput>(band_source));
    if (!cal.admissible) {
        throw std::invalid_argument(
            "calibrated band is inadmissible for the equilibrium engine "
            "(|rho| + phi = " +
            format_float(std::abs(cal.rho) + cal.phi) + ")");
    }
    return cal.band();
}

ScenarioParseError::ScenarioParseError(const std::string& origin, int line_,
                                       int col_, const std::string& what_)
    : std::runtime_error(origin + ":" + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": " + what_),
      line(line_),
      col(col_) {}

namespace {

struct RawEntry {
    std::string value;
    int line;
    int col;
};

struct RawSection {
    std::map<std::string, RawEntry> entries;
    int line = 0;
    bool present = false;
};

struct RawConfig {
    std::string origin;
    std::map<std::string, RawSection> sections;

    [[noreturn]] void fail(int line, int col, const std::string& msg) const {
        throw ScenarioParseError(origin, line, col, msg);
    }
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

const std::map<std::string, std::vector<std::string>> kSchema = {
    {"scenario", {"name"}},
    {"market",
     {"l_per_year", "eta_per_sqrt_year", "r_per_year", "mu_per_year",
      "sigma_per_sqrt_year", "alpha", "gamma", "t0_years", "horizon_years"}},
    {"band", {"rho", "phi"}},
    {"calibration", {"rho_hat", "n_obs", "confidence"}},
    {"grid", {"start_years", "stop_years", "step_years"}},
    {"outputs", {"artifacts"}},
    {"mc", {"n_paths", "dt_years", "seed", "m0"}},
};

RawConfig tokenize(std::string_view text, const std::string& origin) {
    RawConfig cfg;
    cfg.origin = origin;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        const std::string_view stripped = trim(line);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                cfg.fail(line_no, 1, "unterminated section header");
            }
            current = std::string(trim(stripped.substr(1, stripped.size() - 2)));
            if (!kSchema.count(current)) {
                cfg.fail(line_no, 1, "unknown section [" + current + "]");
            }
            if (cfg.sections[current].present) {
                cfg.fail(line_no, 1, "duplicate section [" + current + "]");
            }
            cfg.sections[current].present = true;
            cfg.sections[current].line = line_no;
            continue;
        }

        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            cfg.fail(line_no, int(line.find_first_not_of(" \t")) + 1,
                     "expected 'key = value' or '[section]'");
        }
        if (current.empty()) {
            cfg.fail(line_no, 1, "key outside of any section");
        }
        const std::string key(trim(stripped.substr(0, eq)));
        const std::string value(trim(stripped.substr(eq + 1)));
        const auto& allowed = kSchema.at(current);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            cfg.fail(line_no, 1,
                     "unknown key '" + key + "' in section [" + current + "]");
        }
        if (value.empty()) {
            cfg.fail(line_no, int(eq) + 2, "empty value for '" + key + "'");
        }
        auto [it, inserted] = cfg.sections[current].entries.emplace(
            key, RawEntry{value, line_no, int(eq) + 2});
        if (!inserted) {
            cfg.fail(line_no, 1,
                     "duplicate key '" + key + "' (first at line " +
                         std::to_string(it->second.line) + ")");
        }
    }
    return cfg;
}

class SectionReader {
  public:
    SectionReader(RawConfig& cfg, const std::string& section)
        : cfg_(cfg), name_(section) {}

    bool present() const { return cfg_.sections.count(name_) != 0; }

    std::optional<std::string> raw(const std::string& key) {
        auto sec = cfg_.sections.find(name_);
        if (sec == cfg_.sections.end()) return std::nullopt;
        auto it = sec->second.entries.find(key);
        if (it == sec->second.entries.end()) return std::nullopt;
        last_line_ = it->second.line;
        last_col_ = it->second.col;
        return it->second.value;
    }

    std::string require(const std::string& key) {
        auto v = raw(key);
        if (!v) {
            cfg_.fail(section_line(), 1,
                      "missing required key '" + key + "' in [" + name_ + "]");
        }
        return *v;
    }

    double number(const std::string& key) { return parse_number(require(key)); }

    double number_or(const std::string& key, double fallback) {
        auto v = raw(key);
        return v ? parse_number(*v) : fallback;
    }

    long long integer(const std::string& key) {
        return parse_integer(require(key));
    }

    long long integer_or(const std::string& key, long long fallback) {
        auto v = raw(key);
        return v ? parse_integer(*v) : fallback;
    }

    std::uint64_t unsigned_or(const std::string& key, std::uint64_t fallback) {
        auto v = raw(key);
        if (!v) return fallback;
        std::uint64_t out{};
        const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
        if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
            cfg_.fail(last_line_, last_col_,
                      "'" + *v + "' is not an unsigned integer");
        }
        return out;
    }

    int line() const { return last_line_; }
    int col() const { return last_col_; }

  private:
    int section_line() const {
        auto sec = cfg_.sections.find(name_);
        return sec == cfg_.sections.end() ? 0 : sec->second.line;
    }

    double parse_number(const std::string& v) {
        double out{};
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
            cfg_.fail(last_line_, last_col_, "'" + v + "' is not a number");
        }
        return out;
    }

    long long parse_integer(const std::string& v) {
        long long out{};
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
            cfg_.fail(last_line_, last_col_, "'" + v + "' is not an integer");
        }
        return out;
    }

    RawConfig& cfg_;
    std::string name_;
    int last_line_ = 0;
    int last_col_ = 0;
};

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& origin) {
    RawConfig cfg = tokenize(text, origin);

    SectionReader scenario(cfg, "scenario");
    if (!scenario.present()) cfg.fail(1, 1, "missing [scenario] section");
    const std::string name = scenario.require("name");
    if (name.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
        std::string::npos) {
        cfg.fail(scenario.line(), scenario.col(),
                 "scenario name may contain only [A-Za-z0-9_-]");
    }

    SectionReader market(cfg, "market");
    if (!market.present()) cfg.fail(1, 1, "missing [market] section");
    const double l = market.number("l_per_year");
    const double eta = market.number("eta_per_sqrt_year");
    const double r = market.number("r_per_year");
    const double mu = market.number("mu_per_year");
    const double sigma = market.number("sigma_per_sqrt_year");
    const double alpha = market.number("alpha");
    const double gamma = market.number("gamma");
    const double t0 = market.number("t0_years");
    const double T = market.number("horizon_years");

    SectionReader band(cfg, "band");
    SectionReader calibration(cfg, "calibration");
    if (band.present() == calibration.present()) {
        cfg.fail(1, 1,
                 "exactly one of [band] or [calibration] must be present");
    }

    std::optional<Scenario> out;
    try {
        MarketParams params(l, eta, r, mu, sigma, alpha, gamma, t0, T);
        std::variant<AmbiguityBand, CalibrationInput> source =
            band.present()
                ? std::variant<AmbiguityBand, CalibrationInput>(
                      AmbiguityBand(band.number("rho"), band.number("phi")))
                : std::variant<AmbiguityBand, CalibrationInput>(
                      CalibrationInput(calibration.number("rho_hat"),
                                       int(calibration.integer("n_obs")),
                                       calibration.number("confidence")));

        SectionReader grid(cfg, "grid");
        if (!grid.present()) cfg.fail(1, 1, "missing [grid] section");
        ReportGrid rg{};
        rg.step = grid.number("step_years");
        rg.start = grid.number_or("start_years", t0);
        rg.stop = grid.number_or("stop_years", T);
        if (!(rg.start >= t0 && rg.stop <= T && rg.start < rg.stop)) {
            cfg.fail(cfg.sections.at("grid").line, 1,
                     "grid must satisfy t0 <= start < stop <= T");
        }
        if (!(rg.step > 0.0)) {
            cfg.fail(cfg.sections.at("grid").line, 1, "step_years must be > 0");
        }
        rg.to_time_grid();  // validates

        SectionReader outputs(cfg, "outputs");
        if (!outputs.present()) cfg.fail(1, 1, "missing [outputs] section");
        const std::string artifacts = outputs.require("artifacts");
        std::vector<Artifact> arts;
        std::stringstream ss{artifacts};
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string token(trim(item));
            if (token.empty()) continue;
            const auto art = artifact_from_string(token);
            if (!art) {
                cfg.fail(outputs.line(), outputs.col(),
                         "unknown artifact '" + token + "'");
            }
            if (std::find(arts.begin(), arts.end(), *art) != arts.end()) {
                cfg.fail(outputs.line(), outputs.col(),
                         "duplicate artifact '" + token + "'");
            }
            arts.push_back(*art);
        }
        if (arts.empty()) {
            cfg.fail(outputs.line(), outputs.col(),
                     "requested artifact set must be non-empty");
        }
        std::sort(arts.begin(), arts.end());

        McSettings mc;
        SectionReader mc_reader(cfg, "mc");
        if (mc_reader.present()) {
            mc.n_paths = mc_reader.integer_or("n_paths", mc.n_paths);
            mc.dt = mc_reader.number_or("dt_years", mc.dt);
            mc.seed = mc_reader.unsigned_or("seed", mc.seed);
            mc.m0 = mc_reader.number_or("m0", mc.m0);
            if (mc.n_paths < 1) {
                cfg.fail(cfg.sections.at("mc").line, 1, "n_paths must be >= 1");
            }
            if (!(mc.dt > 0.0)) {
                cfg.fail(cfg.sections.at("mc").line, 1, "dt_years must be > 0");
            }
        }

        out = Scenario{name, params, std::move(source), rg, std::move(arts), mc};
    } catch (const ScenarioParseError&) {
        throw;
    } catch (const std::exception& e) {
        // Domain validation failures surface with the config origin.
        throw ScenarioParseError(origin, 0, 0, e.what());
    }
    return *out;
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open scenario file " + file.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), file.string());
}

std::string write_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[scenario]\nname = " << s.name << "\n\n[market]\n";
    out << "l_per_year = " << format_float(s.params.l) << "\n";
    out << "eta_per_sqrt_year = " << format_float(s.params.eta) << "\n";
    out << "r_per_year = " << format_float(s.params.r) << "\n";
    out << "mu_per_year = " << format_float(s.params.mu) << "\n";
    out << "sigma_per_sqrt_year = " << format_float(s.params.sigma) << "\n";
    out << "alpha = " << format_float(s.params.alpha) << "\n";
    out << "gamma = " << format_float(s.params.gamma) << "\n";
    out << "t0_years = " << format_float(s.params.t0) << "\n";
    out << "horizon_years = " << format_float(s.params.T) << "\n\n";
    if (std::holds_alternative<AmbiguityBand>(s.band_source)) {
        const auto& b = std::get<AmbiguityBand>(s.band_source);
        out << "[band]\nrho = " << format_float(b.rho)
            << "\nphi = " << format_float(b.phi) << "\n\n";
    } else {
        const auto& c = std::get<CalibrationInput>(s.band_source);
        out << "[calibration]\nrho_hat = " << format_float(c.rho_hat)
            << "\nn_obs = " << c.n
            << "\nconfidence = " << format_float(c.confidence) << "\n\n";
    }
    out << "[grid]\nstart_years = " << format_float(s.grid.start)
        << "\nstop_years = " << format_float(s.grid.stop)
        << "\nstep_years = " << format_float(s.grid.step) << "\n\n";
    out << "[outputs]\nartifacts = ";
    for (std::size_t i = 0; i < s.outputs.size(); ++i) {
        out << (i ? ", " : "") << to_string(s.outputs[i]);
    }
    out << "\n\n[mc]\nn_paths = " << s.mc.n_paths
        << "\ndt_years = " << format_float(s.mc.dt) << "\nseed = " << s.mc.seed
        << "\nm0 = " << format_float(s.mc.m0) << "\n";
    return out.str();
}

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;

    void add_row(std::vector<ordered_json> row) {
        rows.push_back(std::move(row));
    }
};

std::string csv_cell(const ordered_json& cell) {
    if (cell.is_null()) return "";
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_number_integer()) {
        return std::to_string(cell.get<long long>());
    }
    if (cell.is_number_unsigned()) {
        return std::to_string(cell.get<unsigned long long>());
    }
    return format_float(cell.get<double>());
}

std::filesystem::path write_table(const Table& table,
                                  const std::filesystem::path& out_dir,
                                  const std::string& stem,
                                  OutputFormat format) {
    const char* ext = format == OutputFormat::Csv ? ".csv" : ".json";
    const std::filesystem::path file = out_dir / (stem + ext);
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file " + file.string());
    }
    if (format == OutputFormat::Csv) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << table.columns[i];
        }
        out << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << csv_cell(row[i]);
            }
            out << "\n";
        }
    } else {
        ordered_json arr = ordered_json::array();
        for (const auto& row : table.rows) {
            ordered_json obj = ordered_json::object();
            for (std::size_t i = 0; i < row.size(); ++i) {
                obj[table.columns[i]] = row[i];
            }
            arr.push_back(std::move(obj));
        }
        out << arr.dump(2) << "\n";
    }
    if (!out) {
        throw std::runtime_error("failed while writing " + file.string());
    }
    return file;
}

ordered_json opt_cell(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

void build_path_tables(const Scenario& s, const AmbiguityBand& band,
                       Table& path_table, Table& switch_table) {
    path_table.columns = {"s",      "regime", "theta_star", "x_star",
                          "y_star", "xi_star", "p_rate"};
    switch_table.columns = {"s", "from_regime", "to_regime"};
    const EquilibriumPath path =
        equilibrium_path(s.grid.to_time_grid(), s.params, band);
    for (const auto& pt : path.points) {
        path_table.add_row({pt.s, to_string(pt.regime), opt_cell(pt.theta_star),
                            opt_cell(pt.x_star), opt_cell(pt.y_star),
                            opt_cell(pt.xi_star), opt_cell(pt.p_rate)});
    }
    for (const auto& sw : path.switches) {
        switch_table.add_row({sw.s, to_string(sw.from), to_string(sw.to)});
    }
}

void add_statics_rows(Table& table, double s, EquilibriumRegime regime,
                      const std::array<SensitivityReport, 3>& reports) {
    for (const auto& rep : reports) {
        table.add_row({s, to_string(regime), to_string(rep.quantity),
                       to_string(rep.driver), rep.analytic_sign, rep.fd_value,
                       opt_cell(rep.threshold)});
    }
}

Table build_statics_table(const Scenario& s, const AmbiguityBand& band) {
    Table table;
    table.columns = {"s",     "regime",        "quantity", "driver",
                     "analytic_sign", "fd_value", "threshold"};
    const TimeGrid grid_times = s.grid.to_time_grid();
    for (double t : grid_times.times()) {
        const EquilibriumRegime regime = classify_regime(t, s.params, band);
        switch (regime) {
            case EquilibriumRegime::UpperBoundDistorted:
                add_statics_rows(table, t, regime,
                                 upper_regime_signs(t, s.params, band));
                break;
            case EquilibriumRegime::LowerBoundDistorted:
                add_statics_rows(table, t, regime,
                                 lower_regime_signs(t, s.params, band));
                break;
            default:
                break;
        }
        if (regime != EquilibriumRegime::MarketFailure) {
            add_statics_rows(table, t, regime, sharpe_signs(t, s.params, band));
        }
    }
    return table;
}

Table build_verify_table(const Scenario& s, const AmbiguityBand& band) {
    Table table;
    table.columns = {"s",        "theta_star", "strategy_case", "x_analytic",
                     "y_analytic", "xi_lo",    "xi_hi",         "x_grid",
                     "y_grid",   "xi_grid",    "gap_x",         "gap_y",
                     "gap_xi",   "step_x",     "step_y",        "hjbi_rel_residual"};
    const TimeGrid grid_times = s.grid.to_time_grid();
    for (double t : grid_times.times()) {
        const EquilibriumPoint pt = equilibrium_point(t, s.params, band);
        if (pt.regime == EquilibriumRegime::MarketFailure) continue;
        const double theta = *pt.theta_star;
        const auto ctrl = optimal_control_cara(theta, t, s.params, band);
        const auto grid =
            default_grid_spec(theta, t, s.params, band, 201, 201, 21);
        const auto saddle = grid_maxmin(theta, t, s.params, band, grid,
                                        cara_vm_ratio(t, s.params));
        const double residual = hjbi_relative_residual(theta, t, s.params, band);
        table.add_row({t, theta, to_string(ctrl.strategy_case), ctrl.x, ctrl.y,
                       ctrl.xi_lo, ctrl.xi_hi, saddle.x_hat, saddle.y_hat,
                       saddle.xi_hat, saddle.gap_x, saddle.gap_y, saddle.gap_xi,
                       saddle.step_x, saddle.step_y, residual});
    }
    return table;
}

bool regime_is_constant(const Scenario& s, const AmbiguityBand& band) {
    const EquilibriumRegime first =
        classify_regime(s.params.t0, s.params, band);
    const TimeGrid grid_times = s.grid.to_time_grid();
    for (double t : grid_times.times()) {
        if (classify_regime(t, s.params, band) != first) return false;
    }
    return classify_regime(s.params.T, s.params, band) == first;
}

std::vector<ordered_json> path_stats_row(const PathStats& st) {
    return {static_cast<long long>(st.n_paths),
            st.dt,
            static_cast<unsigned long long>(st.seed),
            st.xi,
            st.mean_utility,
            st.std_error,
            st.v_closed_form,
            st.z_score,
            st.piecewise};
}

Table build_calibration_grid_table(int n) {
    Table table;
    table.columns = {"rho", "confidence", "phi", "rho_lo", "rho_hi",
                     "admissible"};
    const double confidences[] = {0.80, 0.90, 0.95, 0.99};
    for (int i = -9; i <= 9; ++i) {
        const double rho = double(i) / 10.0;
        for (double conf : confidences) {
            const CalibratedBand cal =
                ambiguity_radius(CalibrationInput(rho, n, conf));
            table.add_row({rho, conf, cal.phi, cal.rho_lo, cal.rho_hi,
                           cal.admissible});
        }
    }
    return table;
}

}  // namespace

std::filesystem::path write_calibration_grid(int n,
                                             const std::filesystem::path& out_dir,
                                             const std::string& stem,
                                             OutputFormat format) {
    std::filesystem::create_directories(out_dir);
    return write_table(build_calibration_grid_table(n), out_dir, stem, format);
}

RunManifest run_scenario(const Scenario& s, const RunOptions& opts) {
    const std::vector<Artifact>& artifacts =
        opts.artifact_override ? *opts.artifact_override : s.outputs;
    if (artifacts.empty()) {
        throw std::invalid_argument("requested artifact set must be non-empty");
    }

    McSettings mc = s.mc;
    if (opts.seed_override) mc.seed = *opts.seed_override;

    // Everything that can fail on bad input is resolved before the
    // first output file is created.
    const bool needs_band =
        std::any_of(artifacts.begin(), artifacts.end(),
                    [](Artifact a) { return a != Artifact::CalibrateGrid; });
    std::optional<AmbiguityBand> band;
    if (needs_band) band = s.resolved_band();

    RunManifest manifest;
    manifest.scenario_name = s.name;
    manifest.tool_version = kToolVersion;
    manifest.config_digest = to_hex(fnv1a64(write_scenario(s)));
    manifest.seed = mc.seed;
    manifest.rng_algorithm = "splitmix64 + inverse-normal-cdf v1";
    manifest.timestamp = iso8601_utc_now();

    std::filesystem::create_directories(opts.out_dir);
    const auto emit = [&](const Table& table, const std::string& suffix) {
        const auto file =
            write_table(table, opts.out_dir, s.name + "_" + suffix,
                        opts.format);
        manifest.files.push_back(file.filename().string());
    };

    for (Artifact artifact : artifacts) {
        switch (artifact) {
            case Artifact::Path: {
                Table path_table, switch_table;
                build_path_tables(s, *band, path_table, switch_table);
                emit(path_table, "path");
                emit(switch_table, "switches");
                break;
            }
            case Artifact::Statics:
                emit(build_statics_table(s, *band), "statics");
                break;
            case Artifact::Verify:
                emit(build_verify_table(s, *band), "verify");
                break;
            case Artifact::Mc: {
                SimConfig cfg;
                cfg.n_paths = mc.n_paths;
                cfg.dt = mc.dt;
                cfg.seed = mc.seed;
                cfg.m0 = mc.m0;
                cfg.threads = opts.threads;

                Table stats_table;
                stats_table.columns = {"n_paths",      "dt",
                                       "seed",         "xi",
                                       "mean_utility", "std_error",
                                       "v_closed_form", "z_score",
                                       "piecewise"};
                if (regime_is_constant(s, *band)) {
                    stats_table.add_row(
                        path_stats_row(verify_value_function(s.params, *band,
                                                             cfg)));
                    emit(stats_table, "mc");

                    Table dom_table;
                    dom_table.columns = {"xi", "mean_utility", "std_error",
                                         "z_vs_star", "is_grid_minimum"};
                    const std::vector<double> xi_grid =
                        band->phi > 0.0
                            ? std::vector<double>{-band->phi, 0.0, band->phi}
                            : std::vector<double>{0.0};
                    for (const auto& entry :
                         worst_case_dominance(s.params, *band, xi_grid, cfg)) {
                        dom_table.add_row({entry.xi, entry.mean_utility,
                                           entry.std_error, entry.z_vs_star,
                                           entry.is_grid_minimum});
                    }
                    emit(dom_table, "mc_dominance");
                } else {
                    // Regime switches in-horizon: informational
                    // piecewise-distortion probe instead of a pass/fail
                    // verification.
                    stats_table.add_row(
                        path_stats_row(piecewise_value_probe(s.params, *band,
                                                             cfg)));
                    emit(stats_table, "mc");
                }
                break;
            }
            case Artifact::CalibrateGrid: {
                const int n =
                    std::holds_alternative<CalibrationInput>(s.band_source)
                        ? std::get<CalibrationInput>(s.band_source).n
                        : 30;
                emit(build_calibration_grid_table(n), "calibration_grid");
                break;
            }
        }
    }
    return manifest;
}

std::filesystem::path write_manifest(const std::vector<RunManifest>& records,
                                     const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    ordered_json arr = ordered_json::array();
    for (const auto& rec : records) {
        arr.push_back(ordered_json{{"scenario", rec.scenario_name},
                                   {"tool_version", rec.tool_version},
                                   {"config_digest", rec.config_digest},
                                   {"seed", rec.seed},
                                   {"rng_algorithm", rec.rng_algorithm},
                                   {"timestamp", rec.timestamp},
                                   {"files", rec.files}});
    }
    const std::filesystem::path file = out_dir / "manifest.json";
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest " + file.string());
    }
    out << arr.dump(2) << "\n";
    return file;
}

std::filesystem::path run_sweep(const Scenario& s, const SweepSpec& sweep,
                                const RunOptions& opts) {
    if (sweep.rho_steps < 1 || sweep.phi_steps < 1) {
        throw std::invalid_argument("sweep step counts must be >= 1");
    }
    std::filesystem::create_directories(opts.out_dir);
    Table table;
    table.columns = {"rho", "phi", "s", "regime"};
    const std::vector<double> times =
        sweep.times.empty() ? std::vector<double>{s.params.t0} : sweep.times;
    for (int i = 0; i < sweep.rho_steps; ++i) {
        const double rho =
            sweep.rho_steps == 1
                ? sweep.rho_min
                : sweep.rho_min + (sweep.rho_max - sweep.rho_min) * double(i) /
                                      double(sweep.rho_steps - 1);
        for (int j = 0; j < sweep.phi_steps; ++j) {
            const double phi =
                sweep.phi_steps == 1
                    ? sweep.phi_min
                    : sweep.phi_min + (sweep.phi_max - sweep.phi_min) *
                                          double(j) / double(sweep.phi_steps - 1);
            if (std::abs(rho) + phi >
                1.0 - AmbiguityBand::kAdmissibilityMargin) {
                continue;  // outside the admissible wedge
            }
            const AmbiguityBand band(rho, phi);
            const auto checks = necessary_condition_checks(s.params, band);
            for (double t : times) {
                const EquilibriumRegime regime =
                    classify_regime(t, s.params, band);
                // Necessary-condition invariants, validated per cell.
                if (regime == EquilibriumRegime::LowerBoundDistorted &&
                    !(checks[0].satisfied && checks[1].satisfied)) {
                    throw std::logic_error(
                        "lower-bound regime without its necessary conditions");
                }
                if (regime == EquilibriumRegime::MarketFailure &&
                    !checks[2].satisfied) {
                    throw std::logic_error(
                        "market failure without negative correlation");
                }
                table.add_row({rho, phi, t, to_string(regime)});
            }
        }
    }
    return write_table(table, opts.out_dir, s.name + "_sweep", opts.format);
}

}  // namespace ambieq
