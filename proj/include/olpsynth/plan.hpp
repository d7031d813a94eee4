#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "olpsynth/arith.hpp"
#include "olpsynth/network.hpp"
#include "olpsynth/tensor.hpp"

namespace olpsynth {

/// Decisions for one layer of the synthesized program.
struct LayerPlan {
    std::string name;
    LayerKind kind = LayerKind::Input;
    ArithmeticMode mode = ArithmeticMode::Precise;
    std::size_t u = 1;
    /// Thread-grid size: stored output elements (M_padded * Hout * Wout for a
    /// vectorized convolution). Zero for the input layer.
    std::size_t alpha = 0;
    Layout layout_in{};
    Layout layout_out{};

    /// Runs on the map-major vector kernels.
    bool vectorized() const noexcept;

    friend bool operator==(const LayerPlan&, const LayerPlan&) = default;
};

struct ExecutionPlan {
    std::size_t u = 4;
    std::size_t workers = 1;
    std::vector<LayerPlan> layers;

    friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;
};

struct PlanConfig {
    std::size_t u = 4;
    std::size_t workers = 1;
    /// One mode for every layer, or one per layer in topological order.
    std::vector<ArithmeticMode> modes{ArithmeticMode::Imprecise};
};

/// Layouts are chosen so that consecutive vectorized layers exchange map-major
/// data without reordering; a boundary reorder only appears where a scalar
/// (Precise) layer meets a vectorized one. Throws PlanError on a bad config.
ExecutionPlan build_execution_plan(const NetworkModel& model, const PlanConfig& config);

/// All layers Precise, one worker: the baseline program.
ExecutionPlan reference_plan(const NetworkModel& model);

/// Throws PlanError naming the first layer that disagrees with `model` or
/// with the layouts/grid sizes the builder would derive from the plan's modes.
void check_plan(const ExecutionPlan& plan, const NetworkModel& model);

/// Edges whose producer layout differs from the consumer's input layout.
std::size_t boundary_reorders(const ExecutionPlan& plan, const NetworkModel& model);

/// Line-oriented text:
///   plan 1
///   u <int>
///   workers <int>
///   layer <name> kind=<k> mode=<m> u=<int> alpha=<int> in=<layout> out=<layout>
std::string write_plan(const ExecutionPlan& plan);
ExecutionPlan parse_plan(std::string_view text);
ExecutionPlan load_plan(const std::string& path);
void save_plan(const std::string& path, const ExecutionPlan& plan);

}  // namespace olpsynth
