#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lppl/calibration.hpp"
#include "lppl/error.hpp"
#include "lppl/model.hpp"
#include "lppl/scanner.hpp"
#include "lppl/serialize.hpp"
#include "lppl/synth.hpp"
#include "lppl/timeseries.hpp"

namespace lppl::cli {

enum ExitCode : int { ok = 0, domain_error = 1, usage_error = 2 };

/// Bad flags, unreadable files, malformed configuration.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        const auto trimmed = lppl::detail::trim(item);
        if (!trimmed.empty()) out.emplace_back(trimmed);
    }
    return out;
}

inline double to_real(const std::string& key, const std::string& value) {
    const auto v = lppl::detail::parse_real(value);
    if (!v) throw UsageError("invalid number for '" + key + "': '" + value + "'");
    return *v;
}

inline std::size_t to_count(const std::string& key, const std::string& value) {
    const double v = to_real(key, value);
    if (v < 0 || v != std::floor(v)) throw UsageError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw UsageError("invalid boolean for '" + key + "': '" + value + "'");
}

inline std::vector<double> to_reals(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& s : split(value, ',')) out.push_back(to_real(key, s));
    if (out.empty()) throw UsageError("'" + key + "' needs at least one value");
    return out;
}

inline std::pair<std::string, std::string> key_value(const std::string& item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected KEY=VALUE, got '" + item + "'");
    return {std::string(lppl::detail::trim(item.substr(0, eq))), std::string(lppl::detail::trim(item.substr(eq + 1)))};
}

/// Everything a fit or scan can be configured with, before it is split into library structs.
struct Settings {
    ScanConfig scan;
    CsvOptions csv;

    /// Applies one key; returns false for an unknown key.
    bool set(const std::string& key, const std::string& value) {
        auto& f = scan.filters;
        if (key == "m_min") f.m_min = to_real(key, value);
        else if (key == "m_max") f.m_max = to_real(key, value);
        else if (key == "omega_min") f.omega_min = to_real(key, value);
        else if (key == "omega_max") f.omega_max = to_real(key, value);
        else if (key == "tc_horizon") f.tc_horizon = to_real(key, value);
        else if (key == "max_rmse") f.max_rmse = value == "none" ? std::nullopt : std::optional(to_real(key, value));
        else if (key == "min_oscillations") f.min_oscillations = to_real(key, value);
        else if (key == "allow_in_sample_tc") f.allow_in_sample_tc = to_bool(key, value);
        else if (key == "starts") scan.search.starts = to_count(key, value);
        else if (key == "min_tc_gap") scan.search.min_tc_gap = to_real(key, value);
        else if (key == "seed") scan.seed = static_cast<std::uint64_t>(to_count(key, value));
        else if (key == "jobs") scan.jobs = to_count(key, value);
        else if (key == "min_points") scan.min_points = to_count(key, value);
        else if (key == "windows") scan.window_lengths = to_reals(key, value);
        else if (key == "end_dates") scan.end_dates = to_reals(key, value);
        else if (key == "every") scan.every = to_count(key, value);
        else if (key == "band") {
            const auto b = to_reals(key, value);
            if (b.size() != 2) throw UsageError("'band' needs two probabilities LOW,HIGH");
            scan.band = {b[0], b[1]};
        } else if (key == "time_column") csv.time_column = value;
        else if (key == "price_column") csv.price_column = value;
        else return false;
        return true;
    }

    void set_filter(const std::string& item) {
        const auto [key, value] = key_value(item);
        static const std::vector<std::string> filter_keys{"m_min",     "m_max",           "omega_min",
                                                          "omega_max", "tc_horizon",      "max_rmse",
                                                          "min_oscillations", "allow_in_sample_tc"};
        if (std::find(filter_keys.begin(), filter_keys.end(), key) == filter_keys.end()) {
            throw UsageError("unknown filter '" + key + "'");
        }
        set(key, value);
    }

    /// KEY=VALUE lines; '#' starts a comment.
    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file '" + path + "'");
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (lppl::detail::trim(line).empty()) continue;
            const auto [key, value] = key_value(line);
            if (!set(key, value)) {
                throw UsageError("config file '" + path + "' line " + std::to_string(n) + ": unknown key '" + key + "'");
            }
        }
    }
};

inline PriceSeries read_series(const std::string& path, const CsvOptions& csv, std::ostream& err) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file '" + path + "'");
    auto options = csv;
    if (options.label.empty()) options.label = std::filesystem::path(path).filename().string();
    auto loaded = load_csv(in, options);
    for (const auto& r : loaded.rejected) {
        err << Json{{"warning", "rejected_row"}, {"line", r.line}, {"reason", r.reason}}.dump() << '\n';
    }
    return std::move(loaded.series);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << content;
}

inline Regime parse_regime(const std::string& name, const std::vector<std::string>& items, double t_end) {
    std::map<std::string, double> kv;
    for (const auto& item : items)
        for (const auto& piece : split(item, ',')) {
            const auto [k, v] = key_value(piece);
            kv[k] = to_real(k, v);
        }
    auto take = [&](const std::vector<std::string>& allowed) {
        for (const auto& [k, v] : kv)
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                throw UsageError("unknown parameter '" + k + "' for regime '" + name + "'");
    };
    auto get = [&](const std::string& k, double fallback) { return kv.count(k) ? kv.at(k) : fallback; };

    if (name == "lppl") {
        take({"tc", "m", "omega", "phi", "A", "B", "C"});
        return LpplParams{get("tc", t_end + 20.0), get("m", 0.5), get("omega", 6.28), get("phi", 1.0),
                          get("A", 8.0),           get("B", -1.0), get("C", 0.05)};
    }
    if (name == "exp") {
        take({"rate", "p0"});
        return ExponentialGrowth{get("rate", 0.001), get("p0", 100.0)};
    }
    if (name == "logistic") {
        take({"rate", "capacity", "p0"});
        return LogisticGrowth{get("rate", 0.05), get("capacity", 1000.0), get("p0", 10.0)};
    }
    if (name == "hyperbolic") {
        take({"tc", "alpha", "scale"});
        return HyperbolicGrowth{get("tc", t_end + 20.0), get("alpha", 1.0), get("scale", 100.0)};
    }
    if (name == "cascade") {
        take({"p0", "rate"});
        return CascadeGrowth{get("p0", 2.0), get("rate", 0.02)};
    }
    throw UsageError("unknown regime '" + name + "'");
}

inline std::string error_json(const std::string& kind, const std::string& message) {
    return Json{{"error", kind}, {"message", message}}.dump();
}

} // namespace detail

/**
 * Entry point of the `lppl` tool. argv[0] is the program name.
 * Returns 0 on success, 1 on a domain or data error, 2 on a usage error.
 */
inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    using namespace detail;
    CLI::App app{"Log-periodic power law bubble diagnostics", "lppl"};
    app.require_subcommand(1, 1);

    Settings settings;
    std::string input, config_file, output, output_dir = ".", prefix = "alarm_report";
    std::vector<std::string> filters, params;
    std::string windows, band, end_dates;
    std::size_t every = 0, starts = 0, jobs = 0, min_points = 0;
    std::uint64_t seed = 0;
    double t1 = 0, t2 = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", input, "price CSV")->required();
        sub->add_option("--config", config_file, "KEY=VALUE settings file; flags take precedence");
        sub->add_option("--filters", filters, "filter overrides K=V")->expected(1, -1);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--starts", starts, "multi-start count per fit");
        sub->add_option("--jobs", jobs, "concurrent workers (0 = all cores)");
        sub->add_option("--min-points", min_points, "minimum observations per window");
        sub->add_option("--time-column", settings.csv.time_column, "time column name");
        sub->add_option("--price-column", settings.csv.price_column, "price column name");
    };

    auto* fit_cmd = app.add_subcommand("fit", "calibrate one window, print the fit as JSON");
    add_common(fit_cmd);
    fit_cmd->add_option("--t1", t1, "window start")->required();
    fit_cmd->add_option("--t2", t2, "window end")->required();
    fit_cmd->add_option("--output", output, "write JSON here instead of stdout");

    auto* scan_cmd = app.add_subcommand("scan", "window ensemble scan; writes <prefix>.json and <prefix>.csv");
    add_common(scan_cmd);
    scan_cmd->add_option("--windows", windows, "window lengths L1,L2,...");
    scan_cmd->add_option("--every", every, "evaluate every K-th observation");
    scan_cmd->add_option("--end-dates", end_dates, "explicit evaluation dates D1,D2,...");
    scan_cmd->add_option("--band", band, "t_c quantile band LOW,HIGH");
    scan_cmd->add_option("--output-dir", output_dir, "directory for report files");
    scan_cmd->add_option("--prefix", prefix, "report file name stem");

    SynthSpec synth_spec;
    std::string regime = "lppl";
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic series and its ground-truth sidecar");
    synth_cmd->add_option("--regime", regime, "lppl|exp|logistic|hyperbolic|cascade")
        ->check(CLI::IsMember({"lppl", "exp", "logistic", "hyperbolic", "cascade"}));
    synth_cmd->add_option("--params", params, "regime parameters K=V")->expected(1, -1);
    synth_cmd->add_option("--noise", synth_spec.noise_sigma, "Gaussian noise std-dev on log-price");
    synth_cmd->add_option("--start", synth_spec.t_start, "first grid time");
    synth_cmd->add_option("--end", synth_spec.t_end, "last grid time");
    synth_cmd->add_option("--step", synth_spec.step, "grid spacing");
    synth_cmd->add_option("--seed", synth_spec.seed, "random seed");
    synth_cmd->add_option("--output", output, "CSV path; truth goes to <stem>.truth.json")->required();

    DividendModel dm;
    auto* price_cmd = app.add_subcommand("price", "Gordon-Shapiro price D/(r-g)");
    price_cmd->add_option("--dividend", dm.dividend, "expected annual dividend D")->required();
    price_cmd->add_option("--return", dm.total_return, "total expected return r")->required();
    price_cmd->add_option("--growth", dm.growth, "dividend growth rate g")->required();

    double p0 = 0, rate = 0;
    int steps = 0;
    auto* cascade_cmd = app.add_subcommand("cascade", "doubling cascade table as CSV");
    cascade_cmd->add_option("--p0", p0, "initial population")->required();
    cascade_cmd->add_option("--rate", rate, "initial growth rate")->required();
    cascade_cmd->add_option("--steps", steps, "number of doublings")->required();
    cascade_cmd->add_option("--output", output, "write CSV here instead of stdout");

    std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
    std::reverse(args.begin(), args.end()); // CLI11 consumes a reversed vector
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    try {
        auto apply_common = [&](CLI::App* sub) {
            if (!config_file.empty()) settings.load_file(config_file);
            if (sub->count("--seed")) settings.scan.seed = seed;
            if (sub->count("--starts")) settings.scan.search.starts = starts;
            if (sub->count("--jobs")) settings.scan.jobs = jobs;
            if (sub->count("--min-points")) settings.scan.min_points = min_points;
            for (const auto& f : filters) settings.set_filter(f);
        };

        if (fit_cmd->parsed()) {
            apply_common(fit_cmd);
            const auto series = read_series(input, settings.csv, err);
            const auto window = slice(series, t1, t2, settings.scan.min_points);
            auto search = settings.scan.search;
            search.jobs = settings.scan.jobs;
            const auto fit = fit_window(series, window, search, settings.scan.filters, settings.scan.seed);
            const auto text = to_json(fit).dump(2) + "\n";
            if (output.empty()) out << text;
            else write_file(output, text);
        } else if (scan_cmd->parsed()) {
            apply_common(scan_cmd);
            if (scan_cmd->count("--windows")) settings.set("windows", windows);
            if (scan_cmd->count("--every")) settings.scan.every = every;
            if (scan_cmd->count("--end-dates")) settings.set("end_dates", end_dates);
            if (scan_cmd->count("--band")) settings.set("band", band);
            settings.scan.validate();
            const auto series = read_series(input, settings.csv, err);
            const auto rep = report(series, settings.scan);
            const std::filesystem::path dir(output_dir);
            write_file(dir / (prefix + ".json"), to_json(rep).dump(2) + "\n");
            std::ostringstream csv;
            write_alarm_csv(csv, rep);
            write_file(dir / (prefix + ".csv"), csv.str());
            out << Json{{"json", (dir / (prefix + ".json")).string()},
                        {"csv", (dir / (prefix + ".csv")).string()},
                        {"max_alarm", lppl::detail::num(rep.max_alarm())}}
                       .dump()
                << '\n';
        } else if (synth_cmd->parsed()) {
            synth_spec.regime = parse_regime(regime, params, synth_spec.t_end);
            const auto series = generate(synth_spec);
            std::ostringstream csv;
            save_csv(csv, series);
            const std::filesystem::path path(output);
            write_file(path, csv.str());
            auto sidecar = path;
            sidecar.replace_extension(".truth.json");
            write_file(sidecar, truth_json(synth_spec).dump(2) + "\n");
        } else if (price_cmd->parsed()) {
            out << lppl::detail::format_number(gordon_shapiro_price(dm)) << '\n';
        } else if (cascade_cmd->parsed()) {
            std::ostringstream csv;
            write_cascade_csv(csv, cascade(p0, rate, steps));
            if (output.empty()) out << csv.str();
            else write_file(output, csv.str());
        }
    } catch (const UsageError& e) {
        err << error_json("usage", e.what()) << '\n' << app.help();
        return usage_error;
    } catch (const FitError& e) {
        err << error_json("fit", e.what()) << '\n';
        return domain_error;
    } catch (const DomainError& e) {
        err << error_json("domain", e.what()) << '\n';
        return domain_error;
    } catch (const DataError& e) {
        err << error_json("data", e.what()) << '\n';
        return domain_error;
    } catch (const NumericalError& e) {
        err << error_json("numerical", e.what()) << '\n';
        return domain_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << error_json("usage", e.what()) << '\n';
        return usage_error;
    }
    return ok;
}

} // namespace lppl::cli
