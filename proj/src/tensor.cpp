#include "olpsynth/tensor.hpp"

#include <limits>
#include <string>

#include "olpsynth/error.hpp"

namespace olpsynth {

std::string to_string(const TensorShape& s) {
    return "(" + std::to_string(s.channels) + "," + std::to_string(s.height) + "," + std::to_string(s.width) + ")";
}

void check_shape(const TensorShape& s) {
    if (s.channels == 0 || s.height == 0 || s.width == 0)
        throw ShapeError("tensor shape " + to_string(s) + " has a zero dimension");
    constexpr auto max = std::numeric_limits<std::size_t>::max();
    if (s.channels > max / s.height || s.channels * s.height > max / s.width)
        throw ShapeError("tensor shape " + to_string(s) + " overflows the element count");
}

std::string to_string(const Layout& l) {
    if (l.kind == Layout::Kind::RowMajor) return "rowmajor";
    return "mapmajor:" + std::to_string(l.u);
}

Layout parse_layout(const std::string& text) {
    if (text == "rowmajor") return Layout::row_major();
    constexpr std::string_view prefix = "mapmajor:";
    if (text.starts_with(prefix)) {
        const std::string digits = text.substr(prefix.size());
        std::size_t used = 0;
        unsigned long u = 0;
        try {
            u = std::stoul(digits, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == digits.size() && used > 0 && u >= 1) return Layout::map_major(u);
    }
    throw Error("bad layout '" + text + "'");
}

std::size_t storage_size(const TensorShape& shape, const Layout& layout) {
    check_shape(shape);
    if (layout.kind == Layout::Kind::MapMajor) {
        if (layout.u == 0) throw ShapeError("map-major layout with vector width 0");
        return padded_channels(shape.channels, layout.u) * shape.spatial();
    }
    return shape.elements();
}

Tensor::Tensor(TensorShape shape, Layout layout)
    : shape_(shape), layout_(layout), data_(storage_size(shape, layout), 0.0f) {}

Tensor::Tensor(TensorShape shape, Layout layout, std::vector<float> data)
    : shape_(shape), layout_(layout), data_(std::move(data)) {
    if (data_.size() != storage_size(shape_, layout_))
        throw ShapeError("tensor " + to_string(shape_) + " in " + to_string(layout_) + " needs " +
                         std::to_string(storage_size(shape_, layout_)) + " values, got " +
                         std::to_string(data_.size()));
}

std::size_t Tensor::stored_channels() const noexcept {
    return layout_.is_map_major() ? padded_channels(shape_.channels, layout_.u) : shape_.channels;
}

std::size_t Tensor::offset(std::size_t c, std::size_t h, std::size_t w) const noexcept {
    return layout_offset(shape_, layout_, c, h, w);
}

}  // namespace olpsynth
