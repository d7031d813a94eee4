#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olpsynth/tensor.hpp"

namespace olpsynth {

enum class LayerKind { Input, Conv, ReLU, MaxPool, AvgPool, FullyConnected, Softmax, Concat };

std::string_view to_string(LayerKind k) noexcept;

struct LayerSpec {
    LayerKind kind = LayerKind::Input;
    std::string name;
    std::vector<std::string> predecessors;

    // Conv: N, M, K, S, P. Pools: K, S. FullyConnected: M.
    std::size_t input_channels = 0;
    std::size_t output_channels = 0;
    std::size_t kernel = 0;
    std::size_t stride = 1;
    std::size_t padding = 0;

    // Input only.
    TensorShape input_shape{};

    // 1-based line in the description it came from; 0 when built in code.
    std::size_t source_line = 0;

    /// Conv and FullyConnected carry trained parameters.
    bool has_parameters() const noexcept {
        return kind == LayerKind::Conv || kind == LayerKind::FullyConnected;
    }
};

/// Output extent of a sliding window; nullopt when it would be < 1.
std::optional<std::size_t> window_output(std::size_t in, std::size_t k, std::size_t s, std::size_t p) noexcept;

/// A parsed, topologically ordered network with inferred shapes.
class NetworkModel {
public:
    NetworkModel() = default;

    /// Sorts `layers` topologically and infers shapes. Throws ParseError on
    /// dangling references, cycles, non-positive output dims or a graph
    /// without exactly one input and one terminal layer.
    explicit NetworkModel(std::vector<LayerSpec> layers);

    const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
    std::size_t size() const noexcept { return layers_.size(); }
    const LayerSpec& layer(std::size_t i) const { return layers_.at(i); }

    const TensorShape& output_shape(std::size_t i) const { return output_shapes_.at(i); }
    /// Input shape of a single-predecessor layer (first predecessor otherwise).
    const TensorShape& input_shape(std::size_t i) const;

    const std::vector<std::size_t>& predecessor_indices(std::size_t i) const { return preds_.at(i); }
    const std::vector<std::size_t>& successor_indices(std::size_t i) const { return succs_.at(i); }

    std::optional<std::size_t> find(std::string_view name) const;

    std::size_t input_index() const noexcept { return 0; }
    std::size_t terminal_index() const noexcept { return layers_.size() - 1; }
    const TensorShape& network_input_shape() const { return output_shapes_.front(); }
    const TensorShape& network_output_shape() const { return output_shapes_.back(); }

    /// Number of weights a parametrised layer expects (M*N*K*K for conv,
    /// M*C*H*W for fully connected). Zero for the rest.
    std::size_t weight_count(std::size_t i) const;
    std::size_t bias_count(std::size_t i) const;

private:
    std::vector<LayerSpec> layers_;
    std::vector<TensorShape> output_shapes_;
    std::vector<std::vector<std::size_t>> preds_;
    std::vector<std::vector<std::size_t>> succs_;
};

NetworkModel parse_network_description(std::string_view text);
NetworkModel parse_network_description(std::istream& in);
NetworkModel load_network(const std::string& path);

/// Canonical text form, accepted back by parse_network_description.
std::string serialize(const NetworkModel& model);

}  // namespace olpsynth
