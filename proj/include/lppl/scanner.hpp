#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lppl/calibration.hpp"
#include "lppl/quantile.hpp"
#include "lppl/timeseries.hpp"

namespace lppl {

inline constexpr std::uint64_t default_seed = 20260101;

/// `count + 1` window lengths from `shortest` to `longest` in equal ratios.
inline std::vector<double> geometric_ladder(double shortest, double longest, std::size_t count) {
    if (!(shortest > 0.0 && longest >= shortest) || count == 0) {
        throw DataError("geometric_ladder: need 0 < shortest <= longest and count >= 1");
    }
    const double ratio = std::pow(longest / shortest, 1.0 / static_cast<double>(count));
    std::vector<double> out;
    for (std::size_t i = 0; i <= count; ++i) out.push_back(shortest * std::pow(ratio, static_cast<double>(i)));
    out.back() = longest;
    return out;
}

/// 60 to 750 days, ratio about 1.29.
inline std::vector<double> default_window_lengths() { return geometric_ladder(60.0, 750.0, 10); }

struct TcBand {
    double low = 0.0;
    double median = 0.0;
    double high = 0.0;
};

struct ScanConfig {
    std::vector<double> window_lengths = default_window_lengths();
    /// Explicit evaluation dates; when empty every `every`-th observation counted back from the last.
    std::vector<double> end_dates;
    std::size_t every = 5;
    std::size_t min_points = default_min_window_points;
    SearchConfig search{};
    FilterConfig filters{};
    std::pair<double, double> band{0.1, 0.9};
    std::uint64_t seed = default_seed;
    /// Concurrent fits; 0 means hardware concurrency.
    std::size_t jobs = 0;

    void validate() const {
        if (window_lengths.empty()) throw DataError("scan: no window lengths");
        for (double l : window_lengths)
            if (!(l > 0.0)) throw DataError("scan: window lengths must be positive");
        if (every == 0) throw DataError("scan: 'every' must be at least 1");
        if (!(band.first > 0.0 && band.first < 0.5 && band.second > 0.5 && band.second < 1.0)) {
            throw DataError("scan: band must satisfy 0 < low < 0.5 < high < 1");
        }
        filters.validate();
    }
};

struct ScanResult {
    std::vector<FitResult> fits;
    std::vector<double> end_dates;
    std::size_t infeasible = 0;
    std::size_t failed = 0;
};

/// Evaluation dates of a scan, ascending.
inline std::vector<double> resolve_end_dates(const PriceSeries& series, const ScanConfig& config) {
    std::vector<double> dates;
    if (config.end_dates.empty()) {
        const auto times = series.times();
        for (auto k = static_cast<std::ptrdiff_t>(times.size()) - 1; k >= 0;
             k -= static_cast<std::ptrdiff_t>(config.every)) {
            dates.push_back(times[static_cast<std::size_t>(k)]);
        }
        std::reverse(dates.begin(), dates.end());
    } else {
        dates = config.end_dates;
        std::sort(dates.begin(), dates.end());
        dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
        for (double d : dates) {
            if (d < series.front_time() || d > series.back_time()) {
                throw DataError("scan: end date " + detail::format_number(d) + " outside the series span");
            }
        }
    }
    return dates;
}

/**
 * Fits every feasible (window length, end date) pair. A pair is infeasible
 * when its window starts before the series or holds fewer than
 * `min_points` observations; such pairs are skipped and counted.
 * Output is ordered by (end date, window length) and independent of `jobs`.
 */
inline ScanResult scan(const PriceSeries& series, const ScanConfig& config) {
    config.validate();
    ScanResult result;
    result.end_dates = resolve_end_dates(series, config);

    struct Task {
        FitWindow window;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < result.end_dates.size(); ++d) {
        const double t2 = result.end_dates[d];
        for (std::size_t w = 0; w < config.window_lengths.size(); ++w) {
            const double length = config.window_lengths[w];
            double t1 = t2 - length;
            const double eps = 1e-9 * std::max({1.0, std::abs(t2), length});
            if (t1 < series.front_time() - eps) {
                ++result.infeasible;
                continue;
            }
            t1 = std::max(t1, std::min(series.front_time(), t2));
            try {
                tasks.push_back({slice(series, t1, t2, config.min_points), detail::derive_seed(config.seed, w, d)});
            } catch (const DataError&) {
                ++result.infeasible;
            }
        }
    }
    if (tasks.empty()) throw DataError("scan: no feasible (window length, end date) pair");

    std::vector<std::optional<FitResult>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                slots[i] = fit_window(series, tasks[i].window, config.search, config.filters, tasks[i].seed);
            } catch (const FitError&) {
                slots[i].reset();
            }
        }
    };
    std::size_t jobs = config.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.jobs;
    jobs = std::min(jobs, tasks.size());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    for (auto& s : slots) {
        if (s) {
            result.fits.push_back(std::move(*s));
        } else {
            ++result.failed;
        }
    }
    return result;
}

namespace detail {
template <class F>
void for_fits_at(const std::vector<FitResult>& ensemble, double date, F&& f) {
    for (const auto& fit : ensemble)
        if (fit.window.t2 == date) f(fit);
}
} // namespace detail

/// Fraction of qualified fits among those whose window ends at `date`; 0 when none do.
inline double alarm_index(const std::vector<FitResult>& ensemble, double date) {
    std::size_t total = 0, qualified = 0;
    detail::for_fits_at(ensemble, date, [&](const FitResult& f) {
        ++total;
        if (f.qualified) ++qualified;
    });
    return total == 0 ? 0.0 : static_cast<double>(qualified) / static_cast<double>(total);
}

/// Qualified critical times of the fits ending at `date`, sorted.
inline std::vector<double> tc_samples(const std::vector<FitResult>& ensemble, double date) {
    std::vector<double> out;
    detail::for_fits_at(ensemble, date, [&](const FitResult& f) {
        if (f.qualified) out.push_back(f.params.tc);
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Nearest-rank (low, median, high) quantiles of qualified t_c; nullopt means no signal.
inline std::optional<TcBand> tc_distribution(const std::vector<FitResult>& ensemble, double date,
                                             std::pair<double, double> band = {0.1, 0.9}) {
    const auto samples = tc_samples(ensemble, date);
    if (samples.empty()) return std::nullopt;
    const std::span<const double> s(samples);
    return TcBand{nearest_rank(s, band.first), nearest_rank(s, 0.5), nearest_rank(s, band.second)};
}

struct DateReport {
    double date = 0.0;
    double alarm = 0.0;
    std::size_t qualified = 0;
    std::size_t total = 0;
    std::size_t positive = 0; // qualified fits with B < 0
    std::size_t negative = 0; // qualified fits with B > 0
    BubbleSign sign = BubbleSign::none;
    std::vector<double> tc_samples;
    std::optional<TcBand> band;
};

struct AlarmReport {
    std::string label;
    std::pair<double, double> band{0.1, 0.9};
    std::vector<DateReport> dates;
    std::size_t fits = 0;
    std::size_t infeasible = 0;
    std::size_t failed = 0;
    /// First date whose median t_c is not after the date itself.
    std::optional<double> median_crossing;

    [[nodiscard]] double max_alarm() const noexcept {
        double m = 0.0;
        for (const auto& d : dates) m = std::max(m, d.alarm);
        return m;
    }
    [[nodiscard]] double mean_alarm() const noexcept {
        if (dates.empty()) return 0.0;
        double s = 0.0;
        for (const auto& d : dates) s += d.alarm;
        return s / static_cast<double>(dates.size());
    }
};

inline AlarmReport summarize(const ScanResult& scanned, std::pair<double, double> band, std::string label = {}) {
    AlarmReport report;
    report.label = std::move(label);
    report.band = band;
    report.fits = scanned.fits.size();
    report.infeasible = scanned.infeasible;
    report.failed = scanned.failed;
    for (double date : scanned.end_dates) {
        DateReport d;
        d.date = date;
        detail::for_fits_at(scanned.fits, date, [&](const FitResult& f) {
            ++d.total;
            if (!f.qualified) return;
            ++d.qualified;
            if (f.sign == BubbleSign::positive) ++d.positive;
            if (f.sign == BubbleSign::negative) ++d.negative;
        });
        d.alarm = alarm_index(scanned.fits, date);
        d.sign = d.positive > d.negative   ? BubbleSign::positive
                 : d.negative > d.positive ? BubbleSign::negative
                                           : BubbleSign::none;
        d.tc_samples = tc_samples(scanned.fits, date);
        d.band = tc_distribution(scanned.fits, date, band);
        if (!report.median_crossing && d.band && d.band->median <= date) report.median_crossing = date;
        report.dates.push_back(std::move(d));
    }
    return report;
}

inline AlarmReport report(const PriceSeries& series, const ScanConfig& config) {
    return summarize(scan(series, config), config.band, series.label());
}

} // namespace lppl
