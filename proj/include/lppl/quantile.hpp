#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lppl {

/**
 * Nearest-rank empirical quantile of already sorted data: the smallest sample
 * x_(k) with k = ceil(p n), k >= 1. No interpolation, so every quantile is an
 * observed sample.
 */
template <class T>
T nearest_rank(std::span<const T> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("nearest_rank: p outside [0, 1]");
    const double n = static_cast<double>(sorted.size());
    // The slack absorbs products like 0.3 * 10 = 3.0000000000000004.
    auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

template <class T>
T nearest_rank_unsorted(std::vector<T> samples, double p) {
    std::sort(samples.begin(), samples.end());
    return nearest_rank<T>(std::span<const T>(samples), p);
}

} // namespace lppl
