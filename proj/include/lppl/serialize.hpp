#pragma once

#include <json.hpp>

#include <ostream>
#include <string>

#include "lppl/calibration.hpp"
#include "lppl/detail/format.hpp"
#include "lppl/model.hpp"
#include "lppl/scanner.hpp"
#include "lppl/synth.hpp"

// JSON and CSV renderings of fits, alarm reports, and synthetic ground truth.
// Every real number is rounded to 12 significant digits.

namespace lppl {

using Json = nlohmann::ordered_json;

namespace detail {
inline Json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_significant(v);
}
} // namespace detail

inline Json to_json(const LpplParams& p) {
    using detail::num;
    return Json{{"tc", num(p.tc)},   {"m", num(p.m)}, {"omega", num(p.omega)}, {"phi", num(p.phi)},
                {"A", num(p.A)},     {"B", num(p.B)}, {"C", num(p.C)},         {"C1", num(p.c1())},
                {"C2", num(p.c2())}};
}

inline Json to_json(const FitResult& fit) {
    using detail::num;
    Json filters = Json::array();
    Json reasons = Json::array();
    for (const auto& c : fit.checks) {
        filters.push_back({{"name", c.name}, {"passed", c.passed}, {"value", num(c.value)}, {"reason", c.reason}});
        if (!c.passed) reasons.push_back(c.reason);
    }
    return Json{
        {"window", {{"t1", num(fit.window.t1)}, {"t2", num(fit.window.t2)}, {"n_points", fit.window.size()}}},
        {"params", to_json(fit.params)},
        {"scaling_ratio", fit.params.omega > 0 ? num(scaling_ratio(fit.params.omega)) : Json(nullptr)},
        {"oscillations", num(oscillation_count(fit.params.omega, fit.params.tc, fit.window.t1, fit.window.t2))},
        {"sse", num(fit.sse)},
        {"rmse", num(fit.rmse)},
        {"n_points", fit.n_points},
        {"qualified", fit.qualified},
        {"sign", to_string(fit.sign)},
        {"filters", std::move(filters)},
        {"reasons", std::move(reasons)},
        {"starts", fit.starts},
        {"converged_starts", fit.converged_starts},
    };
}

inline Json to_json(const AlarmReport& report) {
    using detail::num;
    Json dates = Json::array();
    for (const auto& d : report.dates) {
        Json samples = Json::array();
        for (double t : d.tc_samples) samples.push_back(num(t));
        Json band = nullptr;
        if (d.band) band = Json{{"low", num(d.band->low)}, {"median", num(d.band->median)}, {"high", num(d.band->high)}};
        dates.push_back({{"date", num(d.date)},
                         {"alarm", num(d.alarm)},
                         {"qualified", d.qualified},
                         {"total", d.total},
                         {"positive", d.positive},
                         {"negative", d.negative},
                         {"sign", to_string(d.sign)},
                         {"tc_samples", std::move(samples)},
                         {"tc_band", std::move(band)}});
    }
    return Json{{"label", report.label},
                {"band", {num(report.band.first), num(report.band.second)}},
                {"fits", report.fits},
                {"infeasible", report.infeasible},
                {"failed", report.failed},
                {"max_alarm", num(report.max_alarm())},
                {"mean_alarm", num(report.mean_alarm())},
                {"median_crossing", report.median_crossing ? num(*report.median_crossing) : Json(nullptr)},
                {"dates", std::move(dates)}};
}

/// Flat per-date table: date,alarm,qualified,total,tc_q10,tc_median,tc_q90,sign. No-signal bands are empty cells.
inline void write_alarm_csv(std::ostream& out, const AlarmReport& report) {
    using detail::format_number;
    out << "date,alarm,qualified,total,tc_q10,tc_median,tc_q90,sign\n";
    for (const auto& d : report.dates) {
        out << format_number(d.date) << ',' << format_number(d.alarm) << ',' << d.qualified << ',' << d.total << ',';
        if (d.band) {
            out << format_number(d.band->low) << ',' << format_number(d.band->median) << ','
                << format_number(d.band->high);
        } else {
            out << ",,";
        }
        out << ',' << to_string(d.sign) << '\n';
    }
}

inline Json truth_json(const SynthSpec& spec) {
    using detail::num;
    Json params = Json::object();
    for (const auto& [k, v] : regime_truth(spec.regime)) params[k] = num(v);
    return Json{{"regime", regime_name(spec.regime)},
                {"params", std::move(params)},
                {"noise_sigma", num(spec.noise_sigma)},
                {"seed", spec.seed},
                {"grid", {{"start", num(spec.t_start)}, {"end", num(spec.t_end)}, {"step", num(spec.step)}}}};
}

/// One row per doubling: doubling_time,time,population,rate.
inline void write_cascade_csv(std::ostream& out, const std::vector<CascadeState>& rows) {
    using detail::format_number;
    out << "doubling_time,time,population,rate\n";
    for (const auto& r : rows) {
        out << format_number(r.doubling_time) << ',' << format_number(r.time) << ','
            << format_number(r.population) << ',' << format_number(r.rate) << '\n';
    }
}

} // namespace lppl
