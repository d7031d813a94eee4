#include "olpsynth/engine.hpp"

#include <chrono>

#include "olpsynth/error.hpp"
#include "olpsynth/kernels.hpp"
#include "olpsynth/layout.hpp"
#include "olpsynth/validate.hpp"

namespace olpsynth {

double RunResult::total_ms() const noexcept {
    double t = 0.0;
    for (const auto& l : timings) t += l.ms;
    return t;
}

Tensor run_layer_vectorized(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                            ArithmeticMode mode, std::size_t workers) {
    if (layer.kind == LayerKind::Conv) return kernels::conv_map_major(layer, input, reordered, mode, workers);
    if (layer.kind == LayerKind::FullyConnected) return kernels::fc_map_major(layer, input, reordered, mode, workers);
    throw ShapeError("layer '" + layer.name + "' has no vectorized kernel");
}

Executor::Executor(ExecutionPlan plan, NetworkModel model, const ParameterSet& params)
    : plan_(std::move(plan)), model_(std::move(model)) {
    check_plan(plan_, model_);
    if (params.order().kind == ParameterOrder::Kind::Reordered && params.order().u != plan_.u)
        throw PlanError("parameters are reordered for u=" + std::to_string(params.order().u) +
                        " but the plan uses u=" + std::to_string(plan_.u));
    require_valid(model_, params);
    original_ = restore_weights(params, model_);
    bool any_vectorized = false;
    for (const auto& lp : plan_.layers) any_vectorized = any_vectorized || lp.vectorized();
    if (any_vectorized)
        reordered_ = params.order().kind == ParameterOrder::Kind::Reordered ? params
                                                                             : reorder_weights(original_, model_, plan_.u);
}

RunResult Executor::run(const Tensor& input, const RunOptions& options) const {
    using clock = std::chrono::steady_clock;
    if (input.shape() != model_.network_input_shape())
        throw ShapeError("input " + to_string(input.shape()) + " does not match network input " +
                         to_string(model_.network_input_shape()));

    RunResult result;
    std::vector<Tensor> outputs(model_.size());
    std::vector<std::size_t> pending(model_.size());
    for (std::size_t i = 0; i < model_.size(); ++i) pending[i] = model_.successor_indices(i).size();

    const std::size_t workers = plan_.workers;
    for (std::size_t i = 0; i < model_.size(); ++i) {
        const LayerSpec& l = model_.layer(i);
        const LayerPlan& lp = plan_.layers[i];

        if (l.kind == LayerKind::Input) {
            if (input.layout() != lp.layout_out) {
                outputs[i] = convert_layout(input, lp.layout_out);
                ++result.reorders.entry;
            } else {
                outputs[i] = input;
            }
            continue;
        }

        const auto start = clock::now();
        std::vector<Tensor> converted;
        converted.reserve(model_.predecessor_indices(i).size());
        std::vector<const Tensor*> ins;
        for (std::size_t p : model_.predecessor_indices(i)) {
            if (outputs[p].layout() != lp.layout_in) {
                converted.push_back(convert_layout(outputs[p], lp.layout_in));
                ins.push_back(&converted.back());
                ++result.reorders.inter_layer;
            } else {
                ins.push_back(&outputs[p]);
            }
        }
        const Tensor& in = *ins.front();

        Tensor out;
        switch (l.kind) {
            case LayerKind::Conv:
            case LayerKind::FullyConnected:
                if (lp.vectorized()) {
                    out = run_layer_vectorized(l, in, reordered_.for_layer(l.name), lp.mode, workers);
                } else if (l.kind == LayerKind::Conv) {
                    out = kernels::conv_row_major(l, in, original_.for_layer(l.name), workers);
                } else {
                    out = kernels::fc_row_major(l, in, original_.for_layer(l.name), workers);
                }
                break;
            case LayerKind::ReLU: out = kernels::relu(in, workers); break;
            case LayerKind::MaxPool:
            case LayerKind::AvgPool: out = kernels::pool(l, in, workers); break;
            case LayerKind::Softmax: out = kernels::softmax(in); break;
            case LayerKind::Concat: out = kernels::concat(ins); break;
            case LayerKind::Input: break;
        }
        if (i == model_.terminal_index()) {
            if (out.layout().is_map_major()) {
                result.output = reorder_from_map_major(out);
                ++result.reorders.exit;
            } else {
                result.output = out;
            }
        }
        result.timings.push_back({l.name, std::chrono::duration<double, std::milli>(clock::now() - start).count()});
        outputs[i] = std::move(out);

        if (!options.keep_layer_outputs) {
            for (std::size_t p : model_.predecessor_indices(i))
                if (--pending[p] == 0) outputs[p] = Tensor();
        }
    }

    if (model_.size() == 1) result.output = reorder_from_map_major(outputs.front());
    if (options.keep_layer_outputs) result.layer_outputs = std::move(outputs);
    return result;
}

RunResult run_network(const ExecutionPlan& plan, const NetworkModel& model, const ParameterSet& params,
                      const Tensor& input, const RunOptions& options) {
    return Executor(plan, model, params).run(input, options);
}

std::size_t argmax(const Tensor& t) {
    const Tensor rm = reorder_from_map_major(t);
    const auto v = rm.data();
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace olpsynth
