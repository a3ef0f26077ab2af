#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace lppl {

struct SimplexOptions {
    double initial_step = 0.1;          // fraction of each box side
    double relative_ftol = 1e-8;        // spread of f over the simplex, relative to the best f
    double absolute_ftol = 1e-24;
    double xtol = 1e-6;                 // simplex diameter, as a fraction of each box side
    std::size_t max_evaluations = 3000;
};

template <std::size_t N>
struct SimplexResult {
    std::array<double, N> x{};
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

/**
 * Nelder-Mead descent restricted to the box [lower, upper].
 *
 * Trial points are projected onto the box, so the simplex may flatten against
 * a face; a minimizer on the boundary is reported exactly on the bound.
 * Non-finite objective values are treated as +inf.
 */
template <std::size_t N, class F>
SimplexResult<N> minimize_simplex(F&& f, std::array<double, N> start, const std::array<double, N>& lower,
                                  const std::array<double, N>& upper, const SimplexOptions& options = {}) {
    using Point = std::array<double, N>;
    constexpr double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

    SimplexResult<N> result;
    auto project = [&](Point& p) {
        for (std::size_t i = 0; i < N; ++i) p[i] = std::clamp(p[i], lower[i], upper[i]);
    };
    auto eval = [&](const Point& p) {
        ++result.evaluations;
        const double v = f(p);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Point, N + 1> vertex{};
    std::array<double, N + 1> value{};
    project(start);
    vertex[0] = start;
    value[0] = eval(start);
    for (std::size_t i = 0; i < N; ++i) {
        Point p = start;
        const double step = options.initial_step * (upper[i] - lower[i]);
        p[i] = (p[i] + step <= upper[i]) ? p[i] + step : p[i] - step;
        project(p);
        vertex[i + 1] = p;
        value[i + 1] = eval(p);
    }

    std::array<std::size_t, N + 1> order{};
    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[N - 1];

        double diameter = 0.0;
        for (std::size_t k = 0; k <= N; ++k) {
            for (std::size_t i = 0; i < N; ++i) {
                const double side = upper[i] - lower[i];
                const double d = side > 0.0 ? std::abs(vertex[k][i] - vertex[best][i]) / side : 0.0;
                diameter = std::max(diameter, d);
            }
        }
        const double spread = value[worst] - value[best];
        const bool f_flat = std::isfinite(value[best]) &&
                            spread <= options.relative_ftol * std::abs(value[best]) + options.absolute_ftol;
        if ((f_flat && diameter <= options.xtol) || diameter <= 1e-14) {
            result.converged = std::isfinite(value[best]);
            break;
        }
        if (result.evaluations >= options.max_evaluations) break;
        ++result.iterations;

        Point centroid{};
        for (std::size_t k = 0; k <= N; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < N; ++i) centroid[i] += vertex[k][i] / static_cast<double>(N);
        }
        auto along = [&](double coef) {
            Point p;
            for (std::size_t i = 0; i < N; ++i) p[i] = centroid[i] + coef * (centroid[i] - vertex[worst][i]);
            project(p);
            return p;
        };

        const Point reflected = along(reflect);
        const double f_reflected = eval(reflected);
        if (f_reflected < value[best]) {
            const Point expanded = along(expand);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                vertex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < value[second_worst]) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < value[worst];
        const Point contracted = along(outside ? contract : -contract);
        const double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : value[worst])) {
            vertex[worst] = contracted;
            value[worst] = f_contracted;
            continue;
        }
        for (std::size_t k = 0; k <= N; ++k) {
            if (k == best) continue;
            for (std::size_t i = 0; i < N; ++i)
                vertex[k][i] = vertex[best][i] + shrink * (vertex[k][i] - vertex[best][i]);
            value[k] = eval(vertex[k]);
        }
    }

    const auto best_it = std::min_element(value.begin(), value.end());
    const auto best = static_cast<std::size_t>(best_it - value.begin());
    result.x = vertex[best];
    result.value = value[best];
    return result;
}

} // namespace lppl
