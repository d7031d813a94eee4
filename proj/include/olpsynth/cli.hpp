#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace olpsynth::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kBadInput = 2;

struct Options {
    std::string net;
    std::string model;
    std::vector<std::string> plans;
    std::string dataset;
    std::string input;
    std::string out;
    std::string report;
    std::size_t u = 4;
    std::size_t workers = 1;
    std::optional<std::size_t> workers_override;
    std::string mode = "imprecise";  // one mode, or a comma list with one per layer
    double tolerance = 0.0;
    std::size_t runs = 100;
    unsigned long long seed = 1;
};

// Each command prints its report to `out`, diagnostics to `err`, and returns
// an exit status.
int cmd_reorder(const Options& o, std::ostream& out, std::ostream& err);
int cmd_plan(const Options& o, std::ostream& out, std::ostream& err);
int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err);
int cmd_run(const Options& o, std::ostream& out, std::ostream& err);
int cmd_bench(const Options& o, std::ostream& out, std::ostream& err);

}  // namespace olpsynth::cli
