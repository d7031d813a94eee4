#pragma once

#include <cstddef>

#include "olpsynth/params.hpp"
#include "olpsynth/tensor.hpp"

namespace olpsynth {

struct OutputCoordinate {
    std::size_t m = 0;
    std::size_t h = 0;
    std::size_t w = 0;

    friend bool operator==(const OutputCoordinate&, const OutputCoordinate&) = default;
};

/// Task identifier within a layer's thread grid of `alpha` output elements.
struct ThreadIndex {
    std::size_t x = 0;
    std::size_t alpha = 0;
};

struct LayoutDescriptor {
    std::size_t u = 1;
    std::size_t padded_channels = 0;

    /// Throws ShapeError when u == 0.
    static LayoutDescriptor for_channels(std::size_t channels, std::size_t u);
};

/// Thread id -> output element for a map-major output:
///   w = (x / u) % Wout
///   h = (x / (u * Wout)) % Hout
///   m = x % u + (x / (u * Wout * Hout)) * u
/// so task x writes storage slot x. Throws ShapeError if x >= alpha or alpha
/// is not a multiple of u * Wout * Hout.
OutputCoordinate coords_map_major(ThreadIndex x, std::size_t u, std::size_t wout, std::size_t hout);

/// Thread id -> output element for a row-major output.
OutputCoordinate coords_row_major(ThreadIndex x, std::size_t wout, std::size_t hout);

// Unchecked forms for kernel inner loops.
inline OutputCoordinate coords_map_major_unchecked(std::size_t x, std::size_t u, std::size_t wout,
                                                   std::size_t hout) noexcept {
    return {x % u + x / (u * wout * hout) * u, x / (u * wout) % hout, x / u % wout};
}

inline OutputCoordinate coords_row_major_unchecked(std::size_t x, std::size_t wout, std::size_t hout) noexcept {
    return {x / (wout * hout), x / wout % hout, x % wout};
}

/// Row-major -> MapMajor(u). Pad channels are zero.
Tensor reorder_to_map_major(const Tensor& t, std::size_t u);

/// MapMajor(u) -> row-major, dropping pad channels. Row-major input is returned
/// unchanged.
Tensor reorder_from_map_major(const Tensor& t);

/// Converts between any two layouts.
Tensor convert_layout(const Tensor& t, const Layout& target);

/// Rewrites every filter bank map-major over its channel dimension with the
/// channel count padded to a multiple of u. Biases are untouched.
ParameterSet reorder_weights(const ParameterSet& p, const NetworkModel& model, std::size_t u);

/// Inverse of reorder_weights.
ParameterSet restore_weights(const ParameterSet& p, const NetworkModel& model);

}  // namespace olpsynth
