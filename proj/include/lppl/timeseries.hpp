#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lppl/detail/format.hpp"
#include "lppl/error.hpp"

namespace lppl {

inline constexpr std::size_t default_min_window_points = 30;

/**
 * Ordered (time, price) observations with a cached log-price view.
 *
 * Times are real-valued days (fractional allowed), strictly increasing.
 * Prices are strictly positive. Immutable after construction.
 */
class PriceSeries {
public:
    PriceSeries(std::vector<double> times, std::vector<double> prices, std::string label = {},
                std::map<std::string, double> metadata = {})
        : times_(std::move(times)), prices_(std::move(prices)), label_(std::move(label)),
          metadata_(std::move(metadata)) {
        if (times_.size() != prices_.size()) {
            throw DataError("price series: times and prices differ in length");
        }
        if (times_.size() < 2) {
            throw DataError("price series: at least 2 observations required");
        }
        log_prices_.reserve(prices_.size());
        for (std::size_t i = 0; i < times_.size(); ++i) {
            if (!std::isfinite(times_[i])) {
                throw DataError("price series: non-finite time at index " + std::to_string(i));
            }
            if (i > 0 && !(times_[i] > times_[i - 1])) {
                throw DataError("price series: times not strictly increasing at index " +
                                std::to_string(i));
            }
            if (!(prices_[i] > 0.0) || !std::isfinite(prices_[i])) {
                throw DataError("price series: non-positive price at index " + std::to_string(i));
            }
            log_prices_.push_back(std::log(prices_[i]));
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::span<const double> prices() const noexcept { return prices_; }
    [[nodiscard]] std::span<const double> log_prices() const noexcept { return log_prices_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    /// Free-form numeric annotations; synthetic series store their ground truth here.
    [[nodiscard]] const std::map<std::string, double>& metadata() const noexcept { return metadata_; }

    [[nodiscard]] double front_time() const noexcept { return times_.front(); }
    [[nodiscard]] double back_time() const noexcept { return times_.back(); }

    /// Same observations with every price multiplied by `factor`.
    [[nodiscard]] PriceSeries scaled(double factor) const {
        std::vector<double> p(prices_);
        for (auto& v : p) v *= factor;
        return {times_, std::move(p), label_, metadata_};
    }

    /// Same observations with every timestamp shifted by `delta`.
    [[nodiscard]] PriceSeries shifted(double delta) const {
        std::vector<double> t(times_);
        for (auto& v : t) v += delta;
        return {std::move(t), prices_, label_, metadata_};
    }

private:
    std::vector<double> times_;
    std::vector<double> prices_;
    std::vector<double> log_prices_;
    std::string label_;
    std::map<std::string, double> metadata_;
};

/// Closed time interval [t1, t2] resolved to the half-open index range [begin, end).
struct FitWindow {
    double t1 = 0.0;
    double t2 = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    [[nodiscard]] double length() const noexcept { return t2 - t1; }
    friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

/// Resolves all observations with t1 <= time <= t2.
inline FitWindow slice(const PriceSeries& series, double t1, double t2,
                       std::size_t min_points = default_min_window_points) {
    if (!(t1 < t2)) {
        throw DataError("slice: t1 must be strictly less than t2");
    }
    const auto times = series.times();
    if (t2 < times.front() || t1 > times.back()) {
        throw DataError("slice: [t1, t2] does not intersect the series time span");
    }
    const auto lo = std::lower_bound(times.begin(), times.end(), t1);
    const auto hi = std::upper_bound(times.begin(), times.end(), t2);
    FitWindow w{t1, t2, static_cast<std::size_t>(lo - times.begin()),
                static_cast<std::size_t>(hi - times.begin())};
    if (w.size() < std::max<std::size_t>(min_points, 2)) {
        throw DataError("window too small: " + std::to_string(w.size()) + " observations in [" +
                        detail::format_number(t1) + ", " + detail::format_number(t2) +
                        "], minimum " + std::to_string(std::max<std::size_t>(min_points, 2)));
    }
    return w;
}

// ---------------------------------------------------------------------------
// CSV ingestion

struct CsvOptions {
    /// Empty means: use "date" if present, otherwise "time".
    std::string time_column;
    std::string price_column = "price";
    std::string label;
};

struct RejectedRow {
    std::size_t line = 0; // 1-based, header is line 1
    std::string reason;
};

struct LoadResult {
    PriceSeries series;
    std::vector<RejectedRow> rejected;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s.remove_prefix(1);
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == ',' && !quoted) {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    cells.push_back(trim(line.substr(start)));
    return cells;
}

inline std::optional<double> parse_real(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<int> parse_digits(std::string_view s) {
    if (s.empty()) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace detail

/**
 * Parses a time cell. ISO-8601 dates ("2020-01-31", optionally followed by
 * "THH:MM[:SS[.fff]]" and "Z") map to days since 1970-01-01; anything else
 * must be a plain real number and is taken as-is.
 */
inline std::optional<double> parse_time(std::string_view s) {
    s = detail::trim(s);
    const bool looks_like_date = s.size() >= 10 && s[4] == '-' && s[7] == '-';
    if (!looks_like_date) return detail::parse_real(s);

    const auto y = detail::parse_digits(s.substr(0, 4));
    const auto mo = detail::parse_digits(s.substr(5, 2));
    const auto d = detail::parse_digits(s.substr(8, 2));
    if (!y || !mo || !d) return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*mo)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    double days = std::chrono::sys_days{ymd}.time_since_epoch().count();

    auto rest = s.substr(10);
    if (rest.empty()) return days;
    if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
    rest.remove_prefix(1);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
    const auto hh = detail::parse_digits(rest.substr(0, 2));
    const auto mm = detail::parse_digits(rest.substr(3, 2));
    if (!hh || !mm || *hh > 23 || *mm > 59) return std::nullopt;
    double seconds = 0.0;
    if (rest.size() > 5) {
        if (rest[5] != ':') return std::nullopt;
        const auto sec = detail::parse_real(rest.substr(6));
        if (!sec || *sec < 0.0 || *sec >= 61.0) return std::nullopt;
        seconds = *sec;
    }
    days += (*hh * 3600.0 + *mm * 60.0 + seconds) / 86400.0;
    return days;
}

/**
 * Reads a header + rows CSV into a validated PriceSeries.
 *
 * Rows with an unparseable time or a non-positive/unparseable price are
 * skipped and reported in LoadResult::rejected. Rows are sorted by time;
 * repeated timestamps with an identical price collapse to one observation,
 * with differing prices they are an error.
 */
inline LoadResult load_csv(std::istream& in, const CsvOptions& options = {}) {
    std::string line;
    std::size_t line_no = 0;

    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!detail::trim(line).empty()) {
            header_line = line;
            break;
        }
    }
    if (header_line.empty()) throw DataError("csv: empty input");
    header = detail::split_csv_line(header_line);

    auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    std::optional<std::size_t> time_col;
    if (options.time_column.empty()) {
        time_col = find_column("date");
        if (!time_col) time_col = find_column("time");
        if (!time_col) throw DataError("csv: no 'date' or 'time' column in header");
    } else {
        time_col = find_column(options.time_column);
        if (!time_col) throw DataError("csv: column '" + options.time_column + "' not found");
    }
    const auto price_col = find_column(options.price_column);
    if (!price_col) throw DataError("csv: column '" + options.price_column + "' not found");

    struct Row {
        double time;
        double price;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::vector<RejectedRow> rejected;
    const std::size_t needed = std::max(*time_col, *price_col) + 1;

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() < needed) {
            rejected.push_back({line_no, "missing columns"});
            continue;
        }
        const auto t = parse_time(cells[*time_col]);
        if (!t) {
            rejected.push_back({line_no, "unparseable time '" + std::string(cells[*time_col]) + "'"});
            continue;
        }
        const auto p = detail::parse_real(cells[*price_col]);
        if (!p) {
            rejected.push_back({line_no, "unparseable price '" + std::string(cells[*price_col]) + "'"});
            continue;
        }
        if (!(*p > 0.0)) {
            rejected.push_back({line_no, "non-positive price " + std::string(cells[*price_col])});
            continue;
        }
        rows.push_back({*t, *p, line_no});
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.time < b.time; });
    std::vector<double> times;
    std::vector<double> prices;
    times.reserve(rows.size());
    prices.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].time == rows[i - 1].time) {
            if (rows[i].price == rows[i - 1].price) continue;
            throw DataError("csv: duplicate timestamp with different prices on lines " +
                            std::to_string(rows[i - 1].line) + " and " + std::to_string(rows[i].line));
        }
        times.push_back(rows[i].time);
        prices.push_back(rows[i].price);
    }
    if (times.size() < 2) {
        throw DataError("csv: fewer than 2 valid rows (" + std::to_string(times.size()) + " valid, " +
                        std::to_string(rejected.size()) + " rejected)");
    }
    return {PriceSeries(std::move(times), std::move(prices), options.label), std::move(rejected)};
}

inline LoadResult load_csv_string(const std::string& text, const CsvOptions& options = {}) {
    std::istringstream in(text);
    return load_csv(in, options);
}

/// Writes `time,price,log_price` with 12 significant digits.
/// log_price is taken from the printed price, so saving a reloaded file reproduces it byte for byte.
inline void save_csv(std::ostream& out, const PriceSeries& series) {
    out << "time,price,log_price\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double price = detail::round_significant(series.prices()[i]);
        out << detail::format_number(series.times()[i]) << ',' << detail::format_number(price) << ','
            << detail::format_number(std::log(price)) << '\n';
    }
}

} // namespace lppl
