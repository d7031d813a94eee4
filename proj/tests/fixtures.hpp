#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <span>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "olpsynth/dataset.hpp"
#include "olpsynth/engine.hpp"
#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"
#include "olpsynth/reference.hpp"
#include "olpsynth/tensor.hpp"

namespace fixtures {

using namespace olpsynth;

inline Tensor random_tensor(TensorShape s, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
    Tensor t(s, Layout::row_major());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(lo, hi);
    for (float& v : t.data()) v = dist(rng);
    return t;
}

inline LayerSpec conv(std::string name, std::size_t n, std::size_t m, std::size_t k, std::size_t s = 1,
                      std::size_t p = 0) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.name = std::move(name);
    l.predecessors = {"input"};
    l.input_channels = n;
    l.output_channels = m;
    l.kernel = k;
    l.stride = s;
    l.padding = p;
    return l;
}

inline LayerParameters random_params(const LayerSpec& l, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    LayerParameters p{l.name, std::vector<float>(l.output_channels * l.input_channels * l.kernel * l.kernel),
                      std::vector<float>(l.output_channels)};
    for (float& v : p.weights) v = dist(rng);
    for (float& v : p.biases) v = dist(rng);
    return p;
}

inline bool bitwise_equal(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
    return true;
}

/// max |a - b| / max |b|: error relative to the magnitude of the reference.
inline double max_relative_error(std::span<const float> a, std::span<const float> b) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
        scale = std::max(scale, std::abs(static_cast<double>(b[i])));
    }
    return scale > 0.0 ? diff / scale : diff;
}

/// Small denormal-free network where every arithmetic mode classifies alike.
inline const char* kHarmlessNet = R"(# harmless micro-net
input 3 8 8
conv c1 pred=input N=3 M=8 K=3 S=1 P=1
relu r1 pred=c1
maxpool p1 pred=r1 K=2 S=2
conv c2 pred=p1 N=8 M=6 K=3 S=1 P=0
relu r2 pred=c2
fc f1 pred=r2 M=10
softmax prob pred=f1
)";

/// Labels are the all-Precise predictions, so baseline accuracy is 1.
inline LabeledDataset self_labeled(const NetworkModel& model, const ParameterSet& params, std::size_t count,
                                   std::uint64_t seed) {
    LabeledDataset ds;
    ds.shape = model.network_input_shape();
    for (std::size_t i = 0; i < count; ++i) {
        Tensor x = random_tensor(ds.shape, seed + i);
        const auto label = static_cast<std::uint32_t>(argmax(reference::run_reference(model, params, x)));
        ds.records.push_back({std::move(x), label});
    }
    return ds;
}

/// Two 1x1 convolutions over a 2-channel pixel. c1 is the identity; c2 maps
/// (x0, x1) to (x0, scale * x1). With scale denormal, flushing zeroes the
/// class-1 score, and the one record that relies on it flips to class 0.
inline const char* kPoisonNet = R"(input 2 1 1
conv c1 pred=input N=2 M=2 K=1 S=1 P=0
conv c2 pred=c1 N=2 M=2 K=1 S=1 P=0
)";

inline constexpr float kPoisonScale = 1e-39f;  // subnormal in binary32

inline ParameterSet poison_params(float scale = kPoisonScale) {
    return ParameterSet({}, {{"c1", {1.0f, 0.0f, 0.0f, 1.0f}, {0.0f, 0.0f}},
                             {"c2", {1.0f, 0.0f, 0.0f, scale}, {0.0f, 0.0f}}});
}

/// Nine records of class 0 and one of class 1.
inline LabeledDataset poison_dataset() {
    LabeledDataset ds;
    ds.shape = {2, 1, 1};
    for (int i = 0; i < 9; ++i)
        ds.records.push_back({Tensor(ds.shape, Layout::row_major(), {0.5f + 0.05f * static_cast<float>(i), 0.0f}), 0});
    ds.records.push_back({Tensor(ds.shape, Layout::row_major(), {0.0f, 1.0f}), 1});
    return ds;
}

}  // namespace fixtures
