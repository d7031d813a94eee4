#include "olpsynth/params.hpp"

#include <random>

#include "binary_io.hpp"
#include "olpsynth/error.hpp"

namespace olpsynth {

namespace {

constexpr std::uint32_t kVersion = 1;

std::string layer_tag(const std::string& name) { return "layer '" + name + "'"; }

}  // namespace

const LayerParameters& ParameterSet::for_layer(const std::string& name) const {
    for (const auto& l : layers_)
        if (l.layer == name) return l;
    throw Error("no parameters for " + layer_tag(name));
}

std::size_t ParameterSet::total_floats() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
    return n;
}

TensorShape bank_shape(const NetworkModel& model, std::size_t i) {
    const LayerSpec& l = model.layer(i);
    if (l.kind == LayerKind::Conv) return {l.input_channels, l.kernel, l.kernel};
    if (l.kind == LayerKind::FullyConnected) return model.input_shape(i);
    throw Error(layer_tag(l.name) + " has no parameters");
}

namespace {

ParameterSet parse_params(std::span<const std::uint8_t> bytes, const NetworkModel& model, bool reordered) {
    detail::ByteReader in(bytes, reordered ? "CPPR" : "CPPO");
    in.expect_magic(reordered ? "CPPR" : "CPPO");
    const std::uint32_t version = in.u32("version");
    if (version != kVersion) throw FormatError("unsupported parameter file version " + std::to_string(version));
    ParameterOrder order;
    if (reordered) {
        order = {ParameterOrder::Kind::Reordered, in.u32("vector width")};
        if (order.u == 0) throw FormatError("CPPR: vector width 0");
    }

    std::vector<LayerParameters> layers;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const LayerSpec& spec = model.layer(i);
        if (!spec.has_parameters()) continue;
        std::size_t expected = model.weight_count(i);
        if (reordered) {
            const TensorShape bank = bank_shape(model, i);
            expected = spec.output_channels * padded_channels(bank.channels, order.u) * bank.spatial();
        }
        LayerParameters p{spec.name, {}, {}};
        const std::uint64_t wcount = in.u64("weight count of " + layer_tag(spec.name));
        if (wcount != expected)
            throw FormatError(layer_tag(spec.name) + ": expected " + std::to_string(expected) + " weights, file has " +
                              std::to_string(wcount));
        in.floats(p.weights, wcount, "weights of " + layer_tag(spec.name));
        const std::uint64_t bcount = in.u64("bias count of " + layer_tag(spec.name));
        if (bcount != model.bias_count(i))
            throw FormatError(layer_tag(spec.name) + ": expected " + std::to_string(model.bias_count(i)) +
                              " biases, file has " + std::to_string(bcount));
        in.floats(p.biases, bcount, "biases of " + layer_tag(spec.name));
        layers.push_back(std::move(p));
    }
    if (!in.at_end())
        throw FormatError(std::to_string(in.remaining()) + " trailing bytes after the last parametrised layer");
    return ParameterSet(order, std::move(layers));
}

std::vector<std::uint8_t> write_params(const ParameterSet& params, bool reordered) {
    detail::ByteWriter out;
    out.magic(reordered ? "CPPR" : "CPPO");
    out.u32(kVersion);
    if (reordered) out.u32(static_cast<std::uint32_t>(params.order().u));
    for (const auto& l : params.layers()) {
        out.u64(l.weights.size());
        out.floats(l.weights);
        out.u64(l.biases.size());
        out.floats(l.biases);
    }
    return out.take();
}

}  // namespace

ParameterSet parse_model_parameters(std::span<const std::uint8_t> bytes, const NetworkModel& model) {
    return parse_params(bytes, model, false);
}

ParameterSet parse_reordered_parameters(std::span<const std::uint8_t> bytes, const NetworkModel& model) {
    return parse_params(bytes, model, true);
}

ParameterSet load_parameters(const std::string& path, const NetworkModel& model) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() >= 4 && std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) == "CPPR")
        return parse_reordered_parameters(bytes, model);
    return parse_model_parameters(bytes, model);
}

std::vector<std::uint8_t> write_model_parameters(const ParameterSet& params) {
    if (params.order().kind != ParameterOrder::Kind::Original)
        throw Error("CPPO holds parameters in original order only");
    return write_params(params, false);
}

std::vector<std::uint8_t> write_reordered_parameters(const ParameterSet& params) {
    if (params.order().kind != ParameterOrder::Kind::Reordered)
        throw Error("CPPR holds reordered parameters only");
    return write_params(params, true);
}

ParameterSet random_parameters(const NetworkModel& model, std::uint64_t seed, float lo, float hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    std::vector<LayerParameters> layers;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.layer(i).has_parameters()) continue;
        LayerParameters p{model.layer(i).name, std::vector<float>(model.weight_count(i)),
                          std::vector<float>(model.bias_count(i))};
        for (auto& w : p.weights) w = dist(rng);
        for (auto& b : p.biases) b = dist(rng);
        layers.push_back(std::move(p));
    }
    return ParameterSet({}, std::move(layers));
}

}  // namespace olpsynth
