#include "olpsynth/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "olpsynth/error.hpp"

namespace olpsynth {

double trimmed_mean(std::span<const double> durations_ms) {
    if (durations_ms.size() < 3) throw Error("trimmed mean needs at least 3 observations");
    std::vector<double> sorted(durations_ms.begin(), durations_ms.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < sorted.size(); ++i) sum += sorted[i];
    return sum / static_cast<double>(sorted.size() - 2);
}

void summarize(BenchReport& report) {
    for (auto& e : report.entries) e.trimmed_mean_ms = trimmed_mean(e.durations_ms);
    if (report.entries.empty()) return;
    const double base = report.entries.front().trimmed_mean_ms;
    for (auto& e : report.entries) e.speedup = e.trimmed_mean_ms > 0.0 ? base / e.trimmed_mean_ms : 0.0;
}

BenchReport run_bench(std::span<const Executor* const> programs, std::span<const std::string> labels,
                      const Tensor& input, std::size_t runs) {
    if (runs < 3) throw Error("bench needs runs >= 3, got " + std::to_string(runs));
    if (programs.size() != labels.size()) throw Error("bench: one label per program");
    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.runs = runs;
    for (std::size_t p = 0; p < programs.size(); ++p) {
        BenchEntry e;
        e.label = labels[p];
        programs[p]->run(input);  // warmup
        e.durations_ms.reserve(runs);
        for (std::size_t r = 0; r < runs; ++r) {
            const auto start = clock::now();
            programs[p]->run(input);
            e.durations_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - start).count());
        }
        report.entries.push_back(std::move(e));
    }
    summarize(report);
    return report;
}

std::string format_report(const BenchReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "runs " << report.runs << '\n';
    for (const auto& e : report.entries) {
        out << "config " << e.label << " trimmed_mean_ms=" << e.trimmed_mean_ms << " speedup=" << e.speedup
            << '\n';
        out << "durations " << e.label;
        for (double d : e.durations_ms) out << ' ' << d;
        out << '\n';
    }
    return out.str();
}

}  // namespace olpsynth
