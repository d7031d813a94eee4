#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "olpsynth/arith.hpp"
#include "olpsynth/dataset.hpp"
#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"
#include "olpsynth/plan.hpp"

namespace olpsynth {

struct AnalyzerConfig {
    std::size_t u = 4;
    /// Records are classified in parallel on this many threads.
    std::size_t workers = 1;
};

/// Fraction of records whose top-1 class (lowest index on ties) equals the
/// label. Throws Error on an empty dataset, ShapeError on a shape mismatch.
double evaluate_accuracy(const NetworkModel& model, const ParameterSet& params,
                         const std::vector<ArithmeticMode>& modes, const LabeledDataset& dataset,
                         const AnalyzerConfig& config = {});

struct LayerDecision {
    std::string layer;
    bool candidate = false;         // the input layer has no arithmetic
    double solo_degradation = 0.0;  // baseline minus accuracy with only this layer Imprecise
    ArithmeticMode mode = ArithmeticMode::Precise;
};

struct ModeAssignment {
    std::vector<ArithmeticMode> modes;  // one per layer, topological order
    std::vector<LayerDecision> layers;
    double baseline_accuracy = 0.0;
    double achieved_accuracy = 0.0;
    double tolerance = 0.0;
};

/// Greedy per-layer mode selection:
///  1. baseline accuracy with every layer Precise;
///  2. each layer alone switched to Imprecise, giving its degradation;
///  3. layers sorted by ascending degradation (ties by position) are switched
///     to Imprecise one after another while the combined accuracy stays
///     >= baseline - tolerance; the first failure ends this phase;
///  4. each remaining layer is tried as Relaxed, kept if the budget holds.
/// The returned accuracy is re-measured on the final assignment.
ModeAssignment select_modes(const NetworkModel& model, const ParameterSet& params, const LabeledDataset& dataset,
                            double tolerance, const AnalyzerConfig& config = {});

/// Plan realising an assignment.
ExecutionPlan plan_for(const NetworkModel& model, const ModeAssignment& assignment, std::size_t u,
                       std::size_t workers);

/// Line-oriented report: tolerance, baseline, final accuracy, then one line
/// per layer with its solo degradation and chosen mode.
std::string format_report(const ModeAssignment& assignment);

}  // namespace olpsynth
