#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace olpsynth {

struct TensorShape {
    std::size_t channels = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    std::size_t spatial() const noexcept { return height * width; }
    std::size_t elements() const noexcept { return channels * height * width; }

    friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

std::string to_string(const TensorShape& s);

/// Throws ShapeError when a dimension is zero or the element count overflows.
void check_shape(const TensorShape& s);

/// Smallest multiple of `u` that is >= `channels`.
constexpr std::size_t padded_channels(std::size_t channels, std::size_t u) noexcept {
    return (channels + u - 1) / u * u;
}

/// Storage order of a tensor. RowMajor is [c][h][w]; MapMajor(u) groups
/// channels into stacks of u and stores, per stack, [h][w][lane].
struct Layout {
    enum class Kind : std::uint8_t { RowMajor, MapMajor };

    Kind kind = Kind::RowMajor;
    std::size_t u = 1;

    static constexpr Layout row_major() noexcept { return {Kind::RowMajor, 1}; }
    static constexpr Layout map_major(std::size_t u) noexcept { return {Kind::MapMajor, u}; }

    bool is_map_major() const noexcept { return kind == Kind::MapMajor; }

    friend bool operator==(const Layout&, const Layout&) = default;
};

/// "rowmajor" or "mapmajor:<u>".
std::string to_string(const Layout& l);
Layout parse_layout(const std::string& text);

/// Dense fp32 tensor with an explicit layout tag. Map-major tensors carry
/// zero-filled pad channels up to the next multiple of u.
class Tensor {
public:
    Tensor() = default;
    Tensor(TensorShape shape, Layout layout);
    Tensor(TensorShape shape, Layout layout, std::vector<float> data);

    const TensorShape& shape() const noexcept { return shape_; }
    const Layout& layout() const noexcept { return layout_; }

    /// Channel count including pad channels.
    std::size_t stored_channels() const noexcept;
    std::size_t size() const noexcept { return data_.size(); }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }
    std::vector<float>& storage() noexcept { return data_; }

    /// Flat storage position of logical element (c, h, w) under this layout.
    std::size_t offset(std::size_t c, std::size_t h, std::size_t w) const noexcept;

    float at(std::size_t c, std::size_t h, std::size_t w) const noexcept { return data_[offset(c, h, w)]; }
    float& at(std::size_t c, std::size_t h, std::size_t w) noexcept { return data_[offset(c, h, w)]; }

private:
    TensorShape shape_{};
    Layout layout_{};
    std::vector<float> data_;
};

/// Storage length implied by shape and layout.
std::size_t storage_size(const TensorShape& shape, const Layout& layout);

/// Offset of (c, h, w) without building a Tensor.
constexpr std::size_t layout_offset(const TensorShape& s, const Layout& l, std::size_t c, std::size_t h,
                                    std::size_t w) noexcept {
    if (l.kind == Layout::Kind::RowMajor) return (c * s.height + h) * s.width + w;
    const std::size_t stack = c / l.u;
    return ((stack * s.height + h) * s.width + w) * l.u + c % l.u;
}

}  // namespace olpsynth
