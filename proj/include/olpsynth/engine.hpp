#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "olpsynth/arith.hpp"
#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"
#include "olpsynth/plan.hpp"
#include "olpsynth/tensor.hpp"

namespace olpsynth {

struct LayerTiming {
    std::string layer;
    double ms = 0.0;
};

/// Explicit layout conversions performed by one run.
struct ReorderCounts {
    std::size_t entry = 0;        // network input to map-major
    std::size_t inter_layer = 0;  // at plan boundaries between layers
    std::size_t exit = 0;         // final output back to row-major

    std::size_t total() const noexcept { return entry + inter_layer + exit; }
};

struct RunOptions {
    /// Keep every layer's output in its stored layout (for inspection).
    bool keep_layer_outputs = false;
};

struct RunResult {
    Tensor output;  // row-major, pad channels stripped
    std::vector<LayerTiming> timings;
    ReorderCounts reorders;
    std::vector<Tensor> layer_outputs;  // only with keep_layer_outputs

    double total_ms() const noexcept;
};

/// Convolution or fully connected layer on the vectorized path: map-major in,
/// map-major out, parameters in Reordered(u) order with u matching the input.
Tensor run_layer_vectorized(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                            ArithmeticMode mode, std::size_t workers);

/// A synthesized program: plan plus parameters prepared for it. Weight
/// reordering happens once, here.
class Executor {
public:
    /// Accepts original-order parameters or parameters already reordered for
    /// plan.u. Throws PlanError on plan/model/parameter disagreement.
    Executor(ExecutionPlan plan, NetworkModel model, const ParameterSet& params);

    /// Thread-safe; may be called concurrently.
    RunResult run(const Tensor& input, const RunOptions& options = {}) const;

    const ExecutionPlan& plan() const noexcept { return plan_; }
    const NetworkModel& model() const noexcept { return model_; }

private:
    ExecutionPlan plan_;
    NetworkModel model_;
    ParameterSet original_;
    ParameterSet reordered_;
};

RunResult run_network(const ExecutionPlan& plan, const NetworkModel& model, const ParameterSet& params,
                      const Tensor& input, const RunOptions& options = {});

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(const Tensor& t);

}  // namespace olpsynth
