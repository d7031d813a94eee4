#pragma once

#include <span>

#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"
#include "olpsynth/tensor.hpp"

// Single-threaded scalar implementation of every layer kind. It is the
// numerical oracle for the parallel kernels and the speedup baseline.
//
// Convolution: out[m][h][w] = bias[m] + sum over n, kh, kw (in that order) of
// in[n][h*S+kh-P][w*S+kw-P] * wgt[m][n][kh][kw]; the accumulator starts at
// the bias and out-of-bounds taps are skipped.

namespace olpsynth::reference {

Tensor conv2d(const LayerSpec& layer, const Tensor& input, const LayerParameters& params);
Tensor fully_connected(const LayerSpec& layer, const Tensor& input, const LayerParameters& params);
Tensor relu(const Tensor& input);
Tensor max_pool(const LayerSpec& layer, const Tensor& input);
Tensor avg_pool(const LayerSpec& layer, const Tensor& input);
Tensor softmax(const Tensor& input);
Tensor concat(std::span<const Tensor* const> inputs);

/// One layer on row-major tensors. `params` may be null for parameter-free
/// kinds. Throws ShapeError on inconsistent shapes.
Tensor run_layer_reference(const LayerSpec& layer, std::span<const Tensor* const> inputs,
                           const LayerParameters* params);

/// Whole network, all layers Precise, original-order parameters.
Tensor run_reference(const NetworkModel& model, const ParameterSet& params, const Tensor& input);

}  // namespace olpsynth::reference
