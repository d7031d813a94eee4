#pragma once

#include <cstddef>
#include <span>

#include "olpsynth/arith.hpp"
#include "olpsynth/network.hpp"
#include "olpsynth/params.hpp"
#include "olpsynth/tensor.hpp"

// Parallel kernels. Every layer is split into one task per output element
// (output-level parallelism); tasks are handed out in contiguous chunks of
// ceil(alpha / workers). A task owns its output slot, so results do not depend
// on the worker count.

namespace olpsynth::kernels {

/// Vector widths the map-major kernels are instantiated for.
bool supported_width(std::size_t u) noexcept;

/// Convolution on MapMajor(u) input with Reordered(u) parameters, producing
/// MapMajor(u) output directly: task x writes storage slot x, i.e. output
/// element coords_map_major(x). Precise and Relaxed iterate channels one at a
/// time in canonical order; Imprecise keeps u lane accumulators.
Tensor conv_map_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                      ArithmeticMode mode, std::size_t workers);

/// Fully connected on a MapMajor(u) input, lowered to a 1x1 convolution over
/// the flattened storage stream. Parameters must be Reordered(u).
Tensor fc_map_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                    ArithmeticMode mode, std::size_t workers);

/// Precise convolution on row-major tensors; bitwise equal to the reference.
Tensor conv_row_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& original,
                      std::size_t workers);

/// Precise fully connected on row-major tensors, lowered to a 1x1 convolution.
Tensor fc_row_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& original,
                    std::size_t workers);

// Layout-agnostic kernels: the output keeps the input layout.
Tensor relu(const Tensor& input, std::size_t workers);
Tensor pool(const LayerSpec& layer, const Tensor& input, std::size_t workers);
Tensor softmax(const Tensor& input);
/// Map-major inputs are joined stack by stack, which needs every input but
/// the last to have a channel count divisible by u.
Tensor concat(std::span<const Tensor* const> inputs);
bool concat_stackable(std::span<const TensorShape> shapes, std::size_t u) noexcept;

}  // namespace olpsynth::kernels
