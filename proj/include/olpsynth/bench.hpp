#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "olpsynth/engine.hpp"
#include "olpsynth/tensor.hpp"

namespace olpsynth {

/// Mean after dropping one minimum and one maximum observation.
/// Throws Error for fewer than 3 observations.
double trimmed_mean(std::span<const double> durations_ms);

struct BenchEntry {
    std::string label;
    std::vector<double> durations_ms;
    double trimmed_mean_ms = 0.0;
    double speedup = 1.0;  // first entry's trimmed mean / this entry's
};

struct BenchReport {
    std::size_t runs = 0;
    std::vector<BenchEntry> entries;
};

/// Times `runs` executions of every program (after one discarded warmup run)
/// on the same input. The first program is the baseline.
BenchReport run_bench(std::span<const Executor* const> programs, std::span<const std::string> labels,
                      const Tensor& input, std::size_t runs);

/// Fills trimmed means and speedups from raw durations.
void summarize(BenchReport& report);

/// Stable line-oriented text: one "config" line per entry followed by its raw
/// durations.
std::string format_report(const BenchReport& report);

}  // namespace olpsynth
