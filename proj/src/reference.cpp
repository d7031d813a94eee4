#include "olpsynth/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "olpsynth/error.hpp"

namespace olpsynth::reference {

namespace {

void require_row_major(const Tensor& t, const LayerSpec& layer) {
    if (t.layout() != Layout::row_major())
        throw ShapeError("layer '" + layer.name + "': reference path needs row-major input");
}

TensorShape window_shape(const LayerSpec& layer, const TensorShape& in, std::size_t channels, std::size_t pad) {
    const auto h = window_output(in.height, layer.kernel, layer.stride, pad);
    const auto w = window_output(in.width, layer.kernel, layer.stride, pad);
    if (!h || !w) throw ShapeError("layer '" + layer.name + "': window does not fit input " + to_string(in));
    return {channels, *h, *w};
}

}  // namespace

Tensor conv2d(const LayerSpec& layer, const Tensor& input, const LayerParameters& params) {
    require_row_major(input, layer);
    const TensorShape& in = input.shape();
    if (in.channels != layer.input_channels)
        throw ShapeError("layer '" + layer.name + "': input has " + std::to_string(in.channels) +
                         " channels, layer expects " + std::to_string(layer.input_channels));
    const std::size_t N = layer.input_channels, M = layer.output_channels, K = layer.kernel;
    if (params.weights.size() != M * N * K * K || params.biases.size() != M)
        throw ShapeError("layer '" + layer.name + "': parameter block does not match N, M, K");
    const TensorShape os = window_shape(layer, in, M, layer.padding);
    Tensor out(os, Layout::row_major());

    const auto x = input.data();
    const auto& wgt = params.weights;
    const long H = static_cast<long>(in.height), W = static_cast<long>(in.width);
    const long S = static_cast<long>(layer.stride), P = static_cast<long>(layer.padding);
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t oh = 0; oh < os.height; ++oh) {
            for (std::size_t ow = 0; ow < os.width; ++ow) {
                float acc = params.biases[m];
                for (std::size_t n = 0; n < N; ++n) {
                    for (std::size_t kh = 0; kh < K; ++kh) {
                        const long ih = static_cast<long>(oh) * S + static_cast<long>(kh) - P;
                        if (ih < 0 || ih >= H) continue;
                        for (std::size_t kw = 0; kw < K; ++kw) {
                            const long iw = static_cast<long>(ow) * S + static_cast<long>(kw) - P;
                            if (iw < 0 || iw >= W) continue;
                            acc += x[(n * in.height + static_cast<std::size_t>(ih)) * in.width +
                                     static_cast<std::size_t>(iw)] *
                                   wgt[((m * N + n) * K + kh) * K + kw];
                        }
                    }
                }
                out.at(m, oh, ow) = acc;
            }
        }
    }
    return out;
}

Tensor fully_connected(const LayerSpec& layer, const Tensor& input, const LayerParameters& params) {
    require_row_major(input, layer);
    const std::size_t N = input.shape().elements(), M = layer.output_channels;
    if (params.weights.size() != M * N || params.biases.size() != M)
        throw ShapeError("layer '" + layer.name + "': parameter block does not match input size");
    Tensor out({M, 1, 1}, Layout::row_major());
    const auto x = input.data();
    for (std::size_t m = 0; m < M; ++m) {
        float acc = params.biases[m];
        for (std::size_t n = 0; n < N; ++n) acc += x[n] * params.weights[m * N + n];
        out.data()[m] = acc;
    }
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    for (float& v : out.data()) v = v > 0.0f ? v : 0.0f;
    return out;
}

namespace {

template <class Reduce>
Tensor pool(const LayerSpec& layer, const Tensor& input, Reduce reduce) {
    require_row_major(input, layer);
    const TensorShape& in = input.shape();
    const TensorShape os = window_shape(layer, in, in.channels, 0);
    Tensor out(os, Layout::row_major());
    for (std::size_t c = 0; c < os.channels; ++c)
        for (std::size_t oh = 0; oh < os.height; ++oh)
            for (std::size_t ow = 0; ow < os.width; ++ow)
                out.at(c, oh, ow) = reduce([&](std::size_t kh, std::size_t kw) {
                    return input.at(c, oh * layer.stride + kh, ow * layer.stride + kw);
                });
    return out;
}

}  // namespace

Tensor max_pool(const LayerSpec& layer, const Tensor& input) {
    return pool(layer, input, [&](auto tap) {
        float best = -std::numeric_limits<float>::infinity();
        for (std::size_t kh = 0; kh < layer.kernel; ++kh)
            for (std::size_t kw = 0; kw < layer.kernel; ++kw) best = std::max(best, tap(kh, kw));
        return best;
    });
}

Tensor avg_pool(const LayerSpec& layer, const Tensor& input) {
    return pool(layer, input, [&](auto tap) {
        float sum = 0.0f;
        for (std::size_t kh = 0; kh < layer.kernel; ++kh)
            for (std::size_t kw = 0; kw < layer.kernel; ++kw) sum += tap(kh, kw);
        return sum / static_cast<float>(layer.kernel * layer.kernel);
    });
}

Tensor softmax(const Tensor& input) {
    Tensor out = input;
    auto v = out.data();
    const float peak = *std::max_element(v.begin(), v.end());
    float sum = 0.0f;
    for (float& e : v) {
        e = std::exp(e - peak);
        sum += e;
    }
    for (float& e : v) e /= sum;
    return out;
}

Tensor concat(std::span<const Tensor* const> inputs) {
    if (inputs.empty()) throw ShapeError("concat of nothing");
    TensorShape s = inputs.front()->shape();
    s.channels = 0;
    for (const Tensor* t : inputs) {
        if (t->layout() != Layout::row_major()) throw ShapeError("reference concat needs row-major inputs");
        if (t->shape().height != s.height || t->shape().width != s.width)
            throw ShapeError("concat spatial mismatch: " + to_string(t->shape()));
        s.channels += t->shape().channels;
    }
    std::vector<float> data;
    data.reserve(s.elements());
    for (const Tensor* t : inputs) data.insert(data.end(), t->data().begin(), t->data().end());
    return Tensor(s, Layout::row_major(), std::move(data));
}

Tensor run_layer_reference(const LayerSpec& layer, std::span<const Tensor* const> inputs,
                           const LayerParameters* params) {
    if (inputs.empty()) throw ShapeError("layer '" + layer.name + "' has no input");
    if (layer.has_parameters() && params == nullptr)
        throw ShapeError("layer '" + layer.name + "' needs parameters");
    const Tensor& in = *inputs.front();
    switch (layer.kind) {
        case LayerKind::Input: return in;
        case LayerKind::Conv: return conv2d(layer, in, *params);
        case LayerKind::FullyConnected: return fully_connected(layer, in, *params);
        case LayerKind::ReLU: return relu(in);
        case LayerKind::MaxPool: return max_pool(layer, in);
        case LayerKind::AvgPool: return avg_pool(layer, in);
        case LayerKind::Softmax: return softmax(in);
        case LayerKind::Concat: return concat(inputs);
    }
    throw ShapeError("unknown layer kind");
}

Tensor run_reference(const NetworkModel& model, const ParameterSet& params, const Tensor& input) {
    if (params.order().kind != ParameterOrder::Kind::Original)
        throw Error("reference path needs original-order parameters");
    if (input.shape() != model.network_input_shape())
        throw ShapeError("input " + to_string(input.shape()) + " does not match network input " +
                         to_string(model.network_input_shape()));
    std::vector<Tensor> outputs(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const LayerSpec& l = model.layer(i);
        if (l.kind == LayerKind::Input) {
            require_row_major(input, l);
            outputs[i] = input;
            continue;
        }
        std::vector<const Tensor*> ins;
        for (std::size_t p : model.predecessor_indices(i)) ins.push_back(&outputs[p]);
        outputs[i] = run_layer_reference(l, ins, l.has_parameters() ? &params.for_layer(l.name) : nullptr);
    }
    return std::move(outputs.back());
}

}  // namespace olpsynth::reference
