#include "olpsynth/analyzer.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "olpsynth/engine.hpp"
#include "olpsynth/error.hpp"
#include "parallel.hpp"

namespace olpsynth {

namespace {

// Accuracies are ratios of small integers; this absorbs their rounding.
constexpr double kSlack = 1e-12;

}  // namespace

double evaluate_accuracy(const NetworkModel& model, const ParameterSet& params,
                         const std::vector<ArithmeticMode>& modes, const LabeledDataset& dataset,
                         const AnalyzerConfig& config) {
    if (dataset.records.empty()) throw Error("cannot measure accuracy on an empty dataset");
    if (dataset.shape != model.network_input_shape())
        throw ShapeError("dataset shape " + to_string(dataset.shape) + " does not match network input " +
                         to_string(model.network_input_shape()));
    const std::size_t classes = model.network_output_shape().elements();
    for (const auto& r : dataset.records) {
        if (r.input.shape() != model.network_input_shape() || r.input.layout() != Layout::row_major())
            throw ShapeError("dataset record " + to_string(r.input.shape()) + " does not match network input " +
                             to_string(model.network_input_shape()));
        if (r.label >= classes)
            throw Error("dataset label " + std::to_string(r.label) + " exceeds the network's " +
                        std::to_string(classes) + " outputs");
    }

    const Executor exec(build_execution_plan(model, {config.u, 1, modes}), model, params);
    std::vector<unsigned char> correct(dataset.records.size(), 0);
    detail::parallel_for(dataset.records.size(), config.workers, [&](std::size_t i) {
        const auto& r = dataset.records[i];
        correct[i] = argmax(exec.run(r.input).output) == r.label ? 1 : 0;
    });
    const std::size_t hits = std::accumulate(correct.begin(), correct.end(), std::size_t{0});
    return static_cast<double>(hits) / static_cast<double>(dataset.records.size());
}

ModeAssignment select_modes(const NetworkModel& model, const ParameterSet& params, const LabeledDataset& dataset,
                            double tolerance, const AnalyzerConfig& config) {
    if (tolerance < 0.0) throw Error("tolerance must be >= 0");
    if (dataset.records.empty()) throw Error("cannot select modes with an empty dataset");

    ModeAssignment a;
    a.tolerance = tolerance;
    a.modes.assign(model.size(), ArithmeticMode::Precise);
    for (std::size_t i = 0; i < model.size(); ++i)
        a.layers.push_back({model.layer(i).name, model.layer(i).kind != LayerKind::Input, 0.0,
                            ArithmeticMode::Precise});

    auto measure = [&](const std::vector<ArithmeticMode>& modes) {
        return evaluate_accuracy(model, params, modes, dataset, config);
    };
    a.baseline_accuracy = measure(a.modes);
    const double floor = a.baseline_accuracy - tolerance - kSlack;

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!a.layers[i].candidate) continue;
        auto solo = a.modes;
        solo[i] = ArithmeticMode::Imprecise;
        a.layers[i].solo_degradation = a.baseline_accuracy - measure(solo);
        candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
        return a.layers[x].solo_degradation < a.layers[y].solo_degradation;
    });

    std::size_t accepted = 0;
    for (; accepted < candidates.size(); ++accepted) {
        auto trial = a.modes;
        trial[candidates[accepted]] = ArithmeticMode::Imprecise;
        if (measure(trial) < floor) break;
        a.modes = std::move(trial);
    }
    for (std::size_t k = accepted; k < candidates.size(); ++k) {
        auto trial = a.modes;
        trial[candidates[k]] = ArithmeticMode::Relaxed;
        if (measure(trial) >= floor) a.modes = std::move(trial);
    }

    for (std::size_t i = 0; i < model.size(); ++i) a.layers[i].mode = a.modes[i];
    a.achieved_accuracy = measure(a.modes);
    return a;
}

ExecutionPlan plan_for(const NetworkModel& model, const ModeAssignment& assignment, std::size_t u,
                       std::size_t workers) {
    return build_execution_plan(model, {u, workers, assignment.modes});
}

std::string format_report(const ModeAssignment& a) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6);
    out << "tolerance " << a.tolerance << '\n';
    out << "baseline_accuracy " << a.baseline_accuracy << '\n';
    out << "final_accuracy " << a.achieved_accuracy << '\n';
    for (const auto& l : a.layers) {
        out << "layer " << l.layer << " mode=" << (l.candidate ? to_string(l.mode) : "none");
        if (l.candidate) out << " solo_degradation=" << l.solo_degradation;
        out << '\n';
    }
    return out.str();
}

}  // namespace olpsynth
