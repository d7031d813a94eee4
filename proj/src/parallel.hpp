#pragma once

#include <algorithm>
#include <cstddef>

namespace olpsynth::detail {

/// Runs f(i) for i in [0, n) on `workers` OpenMP threads. Each worker owns one
/// contiguous chunk of ceil(n / workers) indices, so which thread touches an
/// index never depends on timing.
template <class F>
void parallel_for(std::size_t n, std::size_t workers, F&& f) {
    if (n == 0) return;
    workers = std::clamp<std::size_t>(workers, 1, n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    const auto chunk = static_cast<int>((n + workers - 1) / workers);
#pragma omp parallel for num_threads(static_cast<int>(workers)) schedule(static, chunk)
    for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

/// Same partition as parallel_for, but hands each worker its whole chunk as
/// f(begin, end).
template <class F>
void parallel_chunks(std::size_t n, std::size_t workers, F&& f) {
    if (n == 0) return;
    workers = std::clamp<std::size_t>(workers, 1, n);
    const std::size_t chunk = (n + workers - 1) / workers;
    const auto count = static_cast<std::ptrdiff_t>((n + chunk - 1) / chunk);
#pragma omp parallel for num_threads(static_cast<int>(workers)) schedule(static, 1)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
        const std::size_t begin = static_cast<std::size_t>(t) * chunk;
        f(begin, std::min(n, begin + chunk));
    }
}

}  // namespace olpsynth::detail
