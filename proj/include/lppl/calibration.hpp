#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lppl/detail/format.hpp"
#include "lppl/detail/random.hpp"
#include "lppl/error.hpp"
#include "lppl/model.hpp"
#include "lppl/simplex.hpp"
#include "lppl/timeseries.hpp"

namespace lppl {

/// Qualification thresholds. Ranges are open: a fit sitting on a bound is rejected.
struct FilterConfig {
    double m_min = 0.01;
    double m_max = 0.99;
    double omega_min = 2.0;
    double omega_max = 15.0;
    /// Largest admissible t_c - t2, as a fraction of the window length.
    double tc_horizon = 0.5;
    std::optional<double> max_rmse;
    double min_oscillations = 1.5;
    /// Post-mortem mode: t_c may also fall up to tc_horizon window lengths before t2.
    bool allow_in_sample_tc = false;

    void validate() const {
        if (!(m_min < m_max)) throw DataError("filters: empty m range");
        if (!(omega_min < omega_max)) throw DataError("filters: empty omega range");
        if (!(omega_min > 0.0)) throw DataError("filters: omega range must be positive");
        if (!(tc_horizon > 0.0)) throw DataError("filters: tc_horizon must be positive");
        if (max_rmse && !(*max_rmse > 0.0)) throw DataError("filters: max_rmse must be positive");
    }
};

struct SearchConfig {
    std::size_t starts = 20;
    /// Smallest t_c - t2 searched, as a fraction of the window length.
    double min_tc_gap = 1e-3;
    SimplexOptions simplex{};
    /// Threads used for the restarts of one fit; 0 means hardware concurrency.
    std::size_t jobs = 1;
};

enum class BubbleSign { none, positive, negative };

inline const char* to_string(BubbleSign s) noexcept {
    switch (s) {
    case BubbleSign::positive: return "positive";
    case BubbleSign::negative: return "negative";
    default: return "none";
    }
}

struct FilterCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string reason; // empty when passed
};

struct StartDiagnostics {
    std::array<double, 3> start{}; // (tc, m, omega)
    std::array<double, 3> end{};
    double sse = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    bool converged = false;
};

struct FitResult {
    LpplParams params;
    FitWindow window;
    double sse = 0.0;
    double rmse = 0.0;
    std::size_t n_points = 0;
    bool qualified = false;
    BubbleSign sign = BubbleSign::none;
    std::vector<FilterCheck> checks;
    std::size_t starts = 0;
    std::size_t converged_starts = 0;

    [[nodiscard]] std::vector<std::string> reasons() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.reason);
        return out;
    }
};

/// Raised when no restart of a fit converges.
class FitError : public NumericalError {
public:
    FitError(const std::string& what, std::vector<StartDiagnostics> diagnostics)
        : NumericalError(what), diagnostics_(std::move(diagnostics)) {}
    [[nodiscard]] const std::vector<StartDiagnostics>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<StartDiagnostics> diagnostics_;
};

struct LinearSolution {
    double A = 0.0;
    double B = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double sse = 0.0;
};

namespace detail {

/**
 * Least-squares fit of the log-prices of one window on the LPPL regressors
 * for fixed (t_c, m, omega). Scratch storage is reused between calls, so an
 * instance must not be shared between threads.
 *
 * Times are held as offsets t2 - t_i and t_c as the gap t_c - t2, which keeps
 * the search exactly invariant under a translation of the time axis.
 */
class LinearProblem {
public:
    LinearProblem(const PriceSeries& series, const FitWindow& window, bool in_sample = false)
        : t2_(window.t2), in_sample_(in_sample) {
        if (window.end > series.size() || window.begin >= window.end) {
            throw DataError("window does not lie inside the series");
        }
        const auto n = static_cast<Eigen::Index>(window.size());
        offsets_.resize(n);
        y_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = window.begin + static_cast<std::size_t>(i);
            offsets_[i] = window.t2 - series.times()[k];
            y_[i] = series.log_prices()[k];
        }
        y_mean_ = y_.mean();
        y_centered_ = y_.array() - y_mean_;
        design_.resize(n, 4);
        scaled_.resize(n, 4);
        qr_ = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(n, 4);
    }

    [[nodiscard]] double t2() const noexcept { return t2_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return offsets_.size(); }

    /// Returns false when the regressors are not finite.
    bool build(double gap, double m, double omega) {
        for (Eigen::Index i = 0; i < offsets_.size(); ++i) {
            double dt = gap + offsets_[i];
            if (in_sample_) dt = std::abs(dt);
            design_(i, 0) = 1.0;
            if (dt == 0.0 && in_sample_) {
                design_(i, 1) = design_(i, 2) = design_(i, 3) = 0.0;
                continue;
            }
            const double log_dt = std::log(dt);
            const double power = std::exp(m * log_dt);
            design_(i, 1) = power;
            design_(i, 2) = power * std::cos(omega * log_dt);
            design_(i, 3) = power * std::sin(omega * log_dt);
        }
        return design_.allFinite();
    }

    /// Solves at (gap, m, omega); sse is +inf when the regressors are not finite.
    LinearSolution solve(double gap, double m, double omega) {
        if (!build(gap, m, omega)) {
            return {0, 0, 0, 0, std::numeric_limits<double>::infinity()};
        }
        // Unit-norm columns for conditioning; y is centred because column 0 absorbs the mean.
        Eigen::Array4d norms;
        for (int j = 0; j < 4; ++j) {
            norms[j] = design_.col(j).norm();
            if (norms[j] == 0.0) norms[j] = 1.0;
            scaled_.col(j) = design_.col(j) / norms[j];
        }
        qr_.compute(scaled_);
        Eigen::Vector4d beta;
        double sse = 0.0;
        if (qr_.rank() == 4) {
            Eigen::Vector4d scaled_beta = qr_.solve(y_centered_);
            sse = (y_centered_ - scaled_ * scaled_beta).squaredNorm();
            beta = scaled_beta.array() / norms;
            beta[0] += y_mean_;
        } else {
            // Minimum-norm solution of the unscaled problem.
            qr_.compute(design_);
            beta = qr_.solve(y_);
            sse = (y_ - design_ * beta).squaredNorm();
        }
        if (!beta.allFinite() || !std::isfinite(sse)) {
            return {0, 0, 0, 0, std::numeric_limits<double>::infinity()};
        }
        return {beta[0], beta[1], beta[2], beta[3], sse};
    }

private:
    double t2_;
    bool in_sample_;
    Eigen::VectorXd offsets_;
    Eigen::VectorXd y_;
    Eigen::VectorXd y_centered_;
    double y_mean_ = 0.0;
    Eigen::MatrixXd design_;
    Eigen::MatrixXd scaled_;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> qr_;
};

} // namespace detail

/**
 * Exact least-squares (A, B, C1, C2) for fixed (t_c, m, omega) on a window.
 * Rank-deficient regressors yield the minimum-norm solution.
 */
inline LinearSolution solve_linear(const PriceSeries& series, const FitWindow& window, double tc, double m,
                                   double omega) {
    if (!(tc > window.t2)) {
        throw DomainError("solve_linear: t_c = " + detail::format_number(tc) + " must lie beyond t2 = " +
                          detail::format_number(window.t2));
    }
    detail::LinearProblem problem(series, window);
    auto sol = problem.solve(tc - window.t2, m, omega);
    if (!std::isfinite(sol.sse)) {
        throw NumericalError("solve_linear: non-finite least-squares solution");
    }
    return sol;
}

/// Number of full log-periodic oscillations between t1 and t2.
inline double oscillation_count(double omega, double tc, double t1, double t2) {
    return omega * std::log(std::abs(tc - t1) / std::abs(tc - t2)) / (2.0 * std::numbers::pi);
}

inline BubbleSign classify_sign(const FitResult& fit) noexcept {
    if (fit.params.B < 0.0) return BubbleSign::positive;
    if (fit.params.B > 0.0) return BubbleSign::negative;
    return BubbleSign::none;
}

struct Verdict {
    bool qualified = false;
    std::vector<FilterCheck> checks;

    [[nodiscard]] std::vector<std::string> reasons() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.reason);
        return out;
    }
};

/// Applies every filter and records each outcome; reasons list all failures.
inline Verdict qualify(const FitResult& fit, const FilterConfig& filters) {
    const auto& p = fit.params;
    const double length = fit.window.length();
    const double gap = p.tc - fit.window.t2;
    Verdict v;

    auto add = [&](std::string name, bool passed, double value, std::string reason) {
        v.checks.push_back({std::move(name), passed, value, passed ? std::string{} : std::move(reason)});
    };

    add("m", p.m > filters.m_min && p.m < filters.m_max, p.m, "m out of range");
    add("omega", p.omega > filters.omega_min && p.omega < filters.omega_max, p.omega, "omega out of range");

    const double horizon = filters.tc_horizon * length;
    const bool tc_ok = filters.allow_in_sample_tc ? (std::abs(gap) < horizon && gap != 0.0)
                                                  : (gap > 0.0 && gap < horizon);
    add("tc_horizon", tc_ok, length > 0.0 ? gap / length : gap, "t_c outside horizon");

    const double osc = oscillation_count(p.omega, p.tc, fit.window.t1, fit.window.t2);
    add("oscillations", std::isfinite(osc) && osc >= filters.min_oscillations, osc, "too few oscillations");

    if (filters.max_rmse) {
        add("rmse", fit.rmse <= *filters.max_rmse, fit.rmse, "rmse above ceiling");
    }

    v.qualified = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& c) { return c.passed; });
    return v;
}

/**
 * Calibrates the LPPL model on one window.
 *
 * The nonlinear parameters (t_c, m, omega) are searched by bounded
 * Nelder-Mead from `search.starts` Latin-hypercube starts drawn from `seed`;
 * (A, B, C1, C2) are solved exactly at every step. The best converged
 * restart wins, lowest index on ties.
 */
inline FitResult fit_window(const PriceSeries& series, const FitWindow& window, const SearchConfig& search,
                            const FilterConfig& filters, std::uint64_t seed) {
    filters.validate();
    if (search.starts == 0) throw DataError("search: at least one start required");
    const double length = window.length();
    if (!(length > 0.0)) throw DataError("fit_window: empty window");

    const double horizon = filters.tc_horizon * length;
    const std::array<double, 3> lower{filters.allow_in_sample_tc ? -horizon : search.min_tc_gap * length,
                                      filters.m_min, filters.omega_min};
    const std::array<double, 3> upper{horizon, filters.m_max, filters.omega_max};
    if (!(lower[0] < upper[0])) throw DataError("search: empty t_c interval");

    const auto design = detail::latin_hypercube<3>(search.starts, detail::derive_seed(seed, 0x4c505043));
    std::vector<StartDiagnostics> diagnostics(search.starts);
    std::vector<std::array<double, 3>> minima(search.starts);

    auto run_range = [&](std::size_t first, std::size_t stride) {
        detail::LinearProblem problem(series, window, filters.allow_in_sample_tc);
        auto objective = [&](const std::array<double, 3>& x) { return problem.solve(x[0], x[1], x[2]).sse; };
        for (std::size_t i = first; i < search.starts; i += stride) {
            std::array<double, 3> x0;
            for (std::size_t d = 0; d < 3; ++d) x0[d] = lower[d] + design[i][d] * (upper[d] - lower[d]);
            const auto r = minimize_simplex<3>(objective, x0, lower, upper, search.simplex);
            minima[i] = r.x;
            auto& diag = diagnostics[i];
            diag.start = {window.t2 + x0[0], x0[1], x0[2]};
            diag.end = {window.t2 + r.x[0], r.x[1], r.x[2]};
            diag.sse = r.value;
            diag.evaluations = r.evaluations;
            diag.converged = r.converged && std::isfinite(r.value);
        }
    };

    std::size_t jobs = search.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : search.jobs;
    jobs = std::min(jobs, search.starts);
    if (jobs <= 1) {
        run_range(0, 1);
    } else {
        std::vector<std::jthread> workers;
        for (std::size_t j = 0; j < jobs; ++j) workers.emplace_back(run_range, j, jobs);
    }

    std::optional<std::size_t> best;
    std::size_t converged = 0;
    for (std::size_t i = 0; i < diagnostics.size(); ++i) {
        if (!diagnostics[i].converged) continue;
        ++converged;
        if (!best || diagnostics[i].sse < diagnostics[*best].sse) best = i;
    }
    if (!best) {
        throw FitError("fit_window: none of " + std::to_string(search.starts) + " starts converged",
                       std::move(diagnostics));
    }

    const auto& winner = minima[*best];
    detail::LinearProblem problem(series, window, filters.allow_in_sample_tc);
    const auto linear = problem.solve(winner[0], winner[1], winner[2]);

    FitResult fit;
    fit.params = LpplParams::from_linear(window.t2 + winner[0], winner[1], winner[2], linear.A, linear.B,
                                         linear.C1, linear.C2);
    fit.window = window;
    fit.sse = linear.sse;
    fit.n_points = window.size();
    fit.rmse = std::sqrt(linear.sse / static_cast<double>(fit.n_points));
    fit.sign = classify_sign(fit);
    fit.starts = search.starts;
    fit.converged_starts = converged;
    auto verdict = qualify(fit, filters);
    fit.qualified = verdict.qualified;
    fit.checks = std::move(verdict.checks);
    return fit;
}

} // namespace lppl
