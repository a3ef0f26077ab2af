#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "lppl/detail/random.hpp"
#include "lppl/error.hpp"
#include "lppl/model.hpp"
#include "lppl/timeseries.hpp"

namespace lppl {

/// Piecewise-exponential doubling cascade: the rate doubles at every population doubling.
struct CascadeGrowth {
    double p0 = 2.0;
    double rate = 0.02;
};

using Regime = std::variant<LpplParams, ExponentialGrowth, LogisticGrowth, HyperbolicGrowth, CascadeGrowth>;

inline const char* regime_name(const Regime& r) noexcept {
    constexpr const char* names[] = {"lppl", "exp", "logistic", "hyperbolic", "cascade"};
    return names[r.index()];
}

struct SynthSpec {
    Regime regime = LpplParams{};
    double t_start = 0.0;
    double t_end = 199.0;
    double step = 1.0;
    double noise_sigma = 0.0; // std-dev of Gaussian noise on log-price
    std::uint64_t seed = 1;
};

/// Noise-free log-value of a regime at time t.
inline double regime_log_value(const Regime& regime, double t) {
    return std::visit(
        [t](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, LpplParams>) {
                return lppl_log_price(r, t);
            } else if constexpr (std::is_same_v<T, CascadeGrowth>) {
                if (!(t < singular_time(r.rate))) {
                    throw DomainError("cascade: t = " + detail::format_number(t) +
                                      " is not before the singular time " +
                                      detail::format_number(singular_time(r.rate)));
                }
                // Locate the doubling interval holding t.
                double start = 0.0, log_pop = std::log(r.p0), rate = r.rate;
                while (t >= start + std::numbers::ln2 / rate) {
                    start += std::numbers::ln2 / rate;
                    log_pop += std::numbers::ln2;
                    rate *= 2.0;
                }
                return log_pop + rate * (t - start);
            } else if constexpr (std::is_same_v<T, ExponentialGrowth>) {
                // Direct form keeps large rate * t finite in log space.
                validate(GrowthSpec{r});
                return std::log(r.p0) + r.rate * t;
            } else {
                return std::log(growth_value(GrowthSpec{r}, t));
            }
        },
        regime);
}

/// Ground-truth parameters of a regime, keyed by name.
inline std::map<std::string, double> regime_truth(const Regime& regime) {
    return std::visit(
        [](const auto& r) -> std::map<std::string, double> {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, LpplParams>) {
                return {{"tc", r.tc}, {"m", r.m}, {"omega", r.omega}, {"phi", r.phi},
                        {"A", r.A},   {"B", r.B}, {"C", r.C}};
            } else if constexpr (std::is_same_v<T, ExponentialGrowth>) {
                return {{"rate", r.rate}, {"p0", r.p0}};
            } else if constexpr (std::is_same_v<T, LogisticGrowth>) {
                return {{"rate", r.rate}, {"capacity", r.capacity}, {"p0", r.p0}};
            } else if constexpr (std::is_same_v<T, HyperbolicGrowth>) {
                return {{"tc", r.tc}, {"alpha", r.alpha}, {"scale", r.scale}};
            } else {
                return {{"p0", r.p0}, {"rate", r.rate}, {"tc", singular_time(r.rate)}};
            }
        },
        regime);
}

/**
 * Samples a regime on the grid t_start, t_start + step, ... <= t_end and
 * returns exp(log-value + noise). Deterministic per seed. The ground truth
 * and noise level are stored in the series metadata.
 */
inline PriceSeries generate(const SynthSpec& spec) {
    if (!(spec.step > 0.0)) throw DataError("synth: step must be positive");
    if (!(spec.t_end > spec.t_start)) throw DataError("synth: t_end must exceed t_start");
    if (!(spec.noise_sigma >= 0.0)) throw DataError("synth: noise_sigma must be non-negative");

    const auto count = static_cast<std::size_t>(std::floor((spec.t_end - spec.t_start) / spec.step + 1e-9)) + 1;
    if (count < 2) throw DataError("synth: grid holds fewer than 2 points");

    detail::Rng rng(detail::derive_seed(spec.seed, 0x53594e54));
    std::vector<double> times(count), prices(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = spec.t_start + static_cast<double>(i) * spec.step;
        double y = regime_log_value(spec.regime, t);
        if (spec.noise_sigma > 0.0) y += spec.noise_sigma * rng.normal();
        times[i] = t;
        prices[i] = std::exp(y);
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            throw DomainError("synth: price at t = " + detail::format_number(t) + " is not a positive finite number");
        }
    }
    auto truth = regime_truth(spec.regime);
    truth["noise_sigma"] = spec.noise_sigma;
    return {std::move(times), std::move(prices), std::string("synth:") + regime_name(spec.regime), std::move(truth)};
}

} // namespace lppl
