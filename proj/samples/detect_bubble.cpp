// Generates a noisy synthetic bubble, calibrates the last 200 days, and
// scans a small window ensemble ending on the final observation.

#include <cstdio>

#include "lppl/lppl.hpp"

int main() {
    lppl::SynthSpec spec;
    spec.regime = lppl::LpplParams{319.0, 0.5, 6.28, 1.0, 8.0, -1.0, 0.05};
    spec.t_end = 299.0;
    spec.noise_sigma = 0.01;
    spec.seed = 7;
    const auto series = lppl::generate(spec);

    const auto window = lppl::slice(series, 99.0, 299.0);
    const auto fit = lppl::fit_window(series, window, {}, {}, 42);
    std::printf("t_c %.2f  m %.3f  omega %.3f  qualified %s  sign %s\n", fit.params.tc, fit.params.m,
                fit.params.omega, fit.qualified ? "yes" : "no", lppl::to_string(fit.sign));

    lppl::ScanConfig config;
    config.window_lengths = lppl::geometric_ladder(60.0, 280.0, 6);
    config.end_dates = {299.0};
    const auto report = lppl::report(series, config);
    const auto& last = report.dates.back();
    std::printf("alarm %.2f (%zu/%zu)", last.alarm, last.qualified, last.total);
    if (last.band) std::printf("  t_c band [%.2f, %.2f] median %.2f", last.band->low, last.band->high, last.band->median);
    std::printf("\n");
}
