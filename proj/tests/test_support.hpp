#pragma once

#include <cstdint>

#include "lppl/model.hpp"
#include "lppl/synth.hpp"

namespace lppl::fixtures {

/// Reference bubble: A=8, B=-1, m=0.5, omega=6.28, phi=1, C=0.05, t_c 20 days past the last sample.
inline LpplParams reference_bubble(double t_end) { return {t_end + 20.0, 0.5, 6.28, 1.0, 8.0, -1.0, 0.05}; }

inline PriceSeries bubble_series(std::uint64_t seed, double noise, double t_end = 199.0) {
    SynthSpec spec;
    spec.regime = reference_bubble(t_end);
    spec.t_start = 0.0;
    spec.t_end = t_end;
    spec.noise_sigma = noise;
    spec.seed = seed;
    return generate(spec);
}

} // namespace lppl::fixtures
