#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "lppl/detail/format.hpp"
#include "lppl/error.hpp"

namespace lppl {

/**
 * Parameters of the log-periodic power law
 *
 *     ln P(t) = A + B (t_c - t)^m + C (t_c - t)^m cos(omega ln(t_c - t) - phi)
 *
 * The oscillation term is also available in the linear form
 * C1 cos(omega ln dt) + C2 sin(omega ln dt) with C1 = C cos(phi), C2 = C sin(phi).
 */
struct LpplParams {
    double tc = 0.0;
    double m = 0.5;
    double omega = 6.0;
    double phi = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;

    [[nodiscard]] double c1() const noexcept { return C * std::cos(phi); }
    [[nodiscard]] double c2() const noexcept { return C * std::sin(phi); }

    /// Builds the (C, phi) form from the linear coefficients; phi lands in [0, 2pi).
    static LpplParams from_linear(double tc, double m, double omega, double A, double B, double C1,
                                  double C2) noexcept {
        double phi = std::atan2(C2, C1);
        if (phi < 0.0) phi += 2.0 * std::numbers::pi;
        if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
        return {tc, m, omega, phi, A, B, std::hypot(C1, C2)};
    }

    friend bool operator==(const LpplParams&, const LpplParams&) = default;
};

namespace detail {
inline void require_before_tc(double tc, double t, const char* what) {
    if (!(t < tc)) {
        throw DomainError(std::string(what) + ": t = " + format_number(t) +
                          " is not before the critical time t_c = " + format_number(tc));
    }
}
} // namespace detail

inline double lppl_log_price(const LpplParams& p, double t) {
    detail::require_before_tc(p.tc, t, "lppl_log_price");
    // Extended precision: the phase omega*ln(dt) can reach ~100 rad, where one
    // double ulp times the oscillation amplitude exceeds 1e-12.
    const long double dt = static_cast<long double>(p.tc) - t;
    const long double log_dt = std::log(dt);
    const long double power = std::exp(p.m * log_dt);
    const long double phase = p.omega * log_dt - static_cast<long double>(p.phi);
    return static_cast<double>(p.A + p.B * power + p.C * power * std::cos(phase));
}

/// Regressors [1, dt^m, dt^m cos(omega ln dt), dt^m sin(omega ln dt)] with dt = t_c - t.
inline std::array<double, 4> lppl_basis(double tc, double m, double omega, double t) {
    detail::require_before_tc(tc, t, "lppl_basis");
    const long double dt = static_cast<long double>(tc) - t;
    const long double log_dt = std::log(dt);
    const long double power = std::exp(m * log_dt);
    const long double phase = omega * log_dt;
    return {1.0, static_cast<double>(power), static_cast<double>(power * std::cos(phase)),
            static_cast<double>(power * std::sin(phase))};
}

inline double scaling_ratio(double omega) {
    if (!(omega > 0.0)) {
        throw DomainError("scaling_ratio: omega must be positive, got " + detail::format_number(omega));
    }
    return std::exp(2.0 * std::numbers::pi / omega);
}

// ---------------------------------------------------------------------------
// Gordon-Shapiro dividend discount model

struct DividendModel {
    double dividend = 0.0;      // D, per year
    double total_return = 0.0;  // r, fraction per year
    double growth = 0.0;        // g, fraction per year
};

inline double gordon_shapiro_price(const DividendModel& dm) {
    if (!(dm.total_return > dm.growth)) {
        throw DomainError("no finite price: total return r = " + detail::format_number(dm.total_return) +
                          " must exceed growth g = " + detail::format_number(dm.growth));
    }
    if (!(dm.dividend > 0.0)) {
        throw DomainError("gordon_shapiro_price: dividend must be positive");
    }
    return dm.dividend / (dm.total_return - dm.growth);
}

/// Total return r = D/P + g.
inline double gordon_shapiro_return(double dividend, double price, double growth) {
    if (!(price > 0.0)) {
        throw DomainError("gordon_shapiro_return: price must be positive, got " +
                          detail::format_number(price));
    }
    return dividend / price + growth;
}

// ---------------------------------------------------------------------------
// Doubling cascade: the growth rate doubles each time the population doubles.

struct CascadeState {
    double time = 0.0;          // years since start
    double population = 0.0;
    double rate = 0.0;          // fraction per year
    double doubling_time = 0.0; // ln 2 / rate
};

inline std::vector<CascadeState> cascade(double p0, double r0, int steps) {
    if (!(p0 > 0.0)) throw DomainError("cascade: initial population must be positive");
    if (!(r0 > 0.0)) throw DomainError("cascade: initial rate must be positive");
    if (steps < 1) throw DomainError("cascade: steps must be at least 1");

    std::vector<CascadeState> rows;
    rows.reserve(static_cast<std::size_t>(steps));
    double time = 0.0;
    double population = p0;
    double rate = r0;
    for (int k = 0; k < steps; ++k) {
        const double doubling = std::numbers::ln2 / rate;
        rows.push_back({time, population, rate, doubling});
        time += doubling;
        population *= 2.0;
        rate *= 2.0;
    }
    return rows;
}

/// Time at which the last listed doubling completes.
inline double cascade_elapsed(const std::vector<CascadeState>& rows) {
    return rows.empty() ? 0.0 : rows.back().time + rows.back().doubling_time;
}

/// Finite-time singularity of the cascade: ln2/r0 * (1 + 1/2 + 1/4 + ...) = 2 ln2 / r0.
inline double singular_time(double r0) {
    if (!(r0 > 0.0)) {
        throw DomainError("singular_time: initial rate must be positive, got " + detail::format_number(r0));
    }
    return 2.0 * std::numbers::ln2 / r0;
}

// ---------------------------------------------------------------------------
// Growth trajectories

struct ExponentialGrowth {
    double rate = 0.0;
    double p0 = 1.0;
};

struct LogisticGrowth {
    double rate = 0.0;
    double capacity = 1.0;
    double p0 = 0.5;
};

/// scale / (t_c - t)^alpha
struct HyperbolicGrowth {
    double tc = 0.0;
    double alpha = 1.0;
    double scale = 1.0;
};

using GrowthSpec = std::variant<ExponentialGrowth, LogisticGrowth, HyperbolicGrowth>;

inline void validate(const GrowthSpec& spec) {
    std::visit(
        [](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, ExponentialGrowth>) {
                if (!std::isfinite(g.rate)) throw DomainError("exponential growth: rate must be finite");
                if (!(g.p0 > 0.0)) throw DomainError("exponential growth: p0 must be positive");
            } else if constexpr (std::is_same_v<T, LogisticGrowth>) {
                if (!(g.p0 > 0.0 && g.capacity > g.p0)) {
                    throw DomainError("logistic growth: requires capacity > p0 > 0");
                }
                if (!std::isfinite(g.rate)) throw DomainError("logistic growth: rate must be finite");
            } else {
                if (!(g.alpha > 0.0)) throw DomainError("hyperbolic growth: alpha must be positive");
                if (!(g.scale > 0.0)) throw DomainError("hyperbolic growth: scale must be positive");
            }
        },
        spec);
}

inline double growth_value(const GrowthSpec& spec, double t) {
    validate(spec);
    return std::visit(
        [t](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, ExponentialGrowth>) {
                return g.p0 * std::exp(g.rate * t);
            } else if constexpr (std::is_same_v<T, LogisticGrowth>) {
                return g.capacity / (1.0 + (g.capacity - g.p0) / g.p0 * std::exp(-g.rate * t));
            } else {
                detail::require_before_tc(g.tc, t, "hyperbolic growth");
                return g.scale / std::pow(g.tc - t, g.alpha);
            }
        },
        spec);
}

} // namespace lppl
