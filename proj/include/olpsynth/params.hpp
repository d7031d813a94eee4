#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "olpsynth/network.hpp"

namespace olpsynth {

/// Weights and biases of one Conv or FullyConnected layer.
struct LayerParameters {
    std::string layer;  // name in the owning model
    std::vector<float> weights;
    std::vector<float> biases;
};

/// Original: weights indexed [m][n][kh][kw] (fully connected: [m][c][h][w]).
/// Reordered(u): each filter bank stored map-major over its channel dim.
struct ParameterOrder {
    enum class Kind : std::uint8_t { Original, Reordered };
    Kind kind = Kind::Original;
    std::size_t u = 1;

    friend bool operator==(const ParameterOrder&, const ParameterOrder&) = default;
};

/// Per-layer parameters in topological order of the parametrised layers.
class ParameterSet {
public:
    ParameterSet() = default;
    ParameterSet(ParameterOrder order, std::vector<LayerParameters> layers)
        : order_(order), layers_(std::move(layers)) {}

    const ParameterOrder& order() const noexcept { return order_; }
    const std::vector<LayerParameters>& layers() const noexcept { return layers_; }
    std::vector<LayerParameters>& layers() noexcept { return layers_; }

    /// Parameters of the named layer; throws Error if absent.
    const LayerParameters& for_layer(const std::string& name) const;

    std::size_t total_floats() const noexcept;

private:
    ParameterOrder order_{};
    std::vector<LayerParameters> layers_;
};

/// Reads a CPPO stream. Counts are checked against `model`; a mismatch names
/// the offending layer.
ParameterSet parse_model_parameters(std::span<const std::uint8_t> bytes, const NetworkModel& model);

/// Reads a CPPR stream (already reordered for the width stored in its header).
ParameterSet parse_reordered_parameters(std::span<const std::uint8_t> bytes, const NetworkModel& model);

/// Dispatches on the magic bytes: CPPO or CPPR.
ParameterSet load_parameters(const std::string& path, const NetworkModel& model);

std::vector<std::uint8_t> write_model_parameters(const ParameterSet& params);
std::vector<std::uint8_t> write_reordered_parameters(const ParameterSet& params);

/// Channel geometry of a layer's per-bank weight block: the tensor each filter
/// bank is reordered as (N,K,K for conv; C,H,W of the input for FC).
TensorShape bank_shape(const NetworkModel& model, std::size_t layer_index);

/// Parameters for every parametrised layer of `model`, drawn uniformly from
/// [lo, hi). Used by tests and the bench command.
ParameterSet random_parameters(const NetworkModel& model, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f);

}  // namespace olpsynth
