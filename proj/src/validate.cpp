#include "olpsynth/validate.hpp"

#include <set>

#include "olpsynth/error.hpp"

namespace olpsynth {

std::vector<Violation> validate(const NetworkModel& model, const ParameterSet& params) {
    std::vector<Violation> out;
    auto add = [&](const std::string& layer, std::string rule, std::string detail) {
        out.push_back({layer, std::move(rule), std::move(detail)});
    };

    const bool reordered = params.order().kind == ParameterOrder::Kind::Reordered;
    std::size_t next_param = 0;
    std::set<std::string> expected_names;

    for (std::size_t i = 0; i < model.size(); ++i) {
        const LayerSpec& l = model.layer(i);
        const auto& preds = model.predecessor_indices(i);

        if (l.kind == LayerKind::Conv) {
            if (l.kernel < 1 || l.stride < 1 || l.input_channels < 1 || l.output_channels < 1)
                add(l.name, "invalid hyperparameter", "conv needs K, S, N, M >= 1");
            const std::size_t fed = model.input_shape(i).channels;
            if (fed != l.input_channels)
                add(l.name, "channel mismatch",
                    "declared N=" + std::to_string(l.input_channels) + " but predecessor has " + std::to_string(fed) +
                        " channels");
        }
        if ((l.kind == LayerKind::MaxPool || l.kind == LayerKind::AvgPool) && (l.kernel < 1 || l.stride < 1))
            add(l.name, "invalid hyperparameter", "pool needs K, S >= 1");
        if (l.kind == LayerKind::FullyConnected && l.output_channels < 1)
            add(l.name, "invalid hyperparameter", "fc needs M >= 1");
        if (l.kind == LayerKind::Concat) {
            const TensorShape& first = model.output_shape(preds.front());
            for (std::size_t p : preds) {
                const TensorShape& s = model.output_shape(p);
                if (s.height != first.height || s.width != first.width)
                    add(l.name, "concat spatial mismatch",
                        "input '" + model.layer(p).name + "' is " + to_string(s) + ", first input is " +
                            to_string(first));
            }
        }

        if (!l.has_parameters()) continue;
        expected_names.insert(l.name);
        if (next_param >= params.layers().size() || params.layers()[next_param].layer != l.name) {
            add(l.name, "missing parameters", "no parameter block in topological position");
            continue;
        }
        const LayerParameters& p = params.layers()[next_param++];
        std::size_t weights = model.weight_count(i);
        if (reordered) {
            const TensorShape bank = bank_shape(model, i);
            weights = l.output_channels * padded_channels(bank.channels, params.order().u) * bank.spatial();
        }
        if (p.weights.size() != weights)
            add(l.name, "weight count mismatch",
                "expected " + std::to_string(weights) + ", have " + std::to_string(p.weights.size()));
        if (p.biases.size() != model.bias_count(i))
            add(l.name, "bias count mismatch",
                "expected " + std::to_string(model.bias_count(i)) + ", have " + std::to_string(p.biases.size()));
    }

    for (const auto& p : params.layers())
        if (!expected_names.contains(p.layer))
            add(p.layer, "unexpected parameters", "no parametrised layer of that name");
    if (reordered && params.order().u == 0) add("", "invalid vector width", "reordered parameters with u = 0");
    return out;
}

void require_valid(const NetworkModel& model, const ParameterSet& params) {
    const auto violations = validate(model, params);
    if (violations.empty()) return;
    std::string msg = "model validation failed:";
    for (const auto& v : violations) msg += "\n  layer '" + v.layer + "': " + v.rule + " (" + v.detail + ")";
    throw Error(msg);
}

}  // namespace olpsynth
