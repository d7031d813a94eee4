#include "olpsynth/layout.hpp"

#include <string>

#include "olpsynth/error.hpp"

namespace olpsynth {

LayoutDescriptor LayoutDescriptor::for_channels(std::size_t channels, std::size_t u) {
    if (u == 0) throw ShapeError("vector width must be >= 1");
    return {u, olpsynth::padded_channels(channels, u)};
}

OutputCoordinate coords_map_major(ThreadIndex x, std::size_t u, std::size_t wout, std::size_t hout) {
    if (u == 0 || wout == 0 || hout == 0) throw ShapeError("coords_map_major: zero extent");
    const std::size_t stack = u * wout * hout;
    if (x.alpha % stack != 0)
        throw ShapeError("thread grid " + std::to_string(x.alpha) + " is not a whole number of " +
                         std::to_string(u) + "-map stacks");
    if (x.x >= x.alpha)
        throw ShapeError("thread id " + std::to_string(x.x) + " out of range [0," + std::to_string(x.alpha) + ")");
    return coords_map_major_unchecked(x.x, u, wout, hout);
}

OutputCoordinate coords_row_major(ThreadIndex x, std::size_t wout, std::size_t hout) {
    if (wout == 0 || hout == 0) throw ShapeError("coords_row_major: zero extent");
    if (x.x >= x.alpha || x.alpha % (wout * hout) != 0)
        throw ShapeError("thread id " + std::to_string(x.x) + " out of range [0," + std::to_string(x.alpha) + ")");
    return coords_row_major_unchecked(x.x, wout, hout);
}

Tensor reorder_to_map_major(const Tensor& t, std::size_t u) {
    if (u == 0) throw ShapeError("vector width must be >= 1");
    if (t.layout().is_map_major()) {
        if (t.layout().u == u) return t;
        return reorder_to_map_major(reorder_from_map_major(t), u);
    }
    const TensorShape& s = t.shape();
    Tensor out(s, Layout::map_major(u));
    const auto src = t.data();
    auto dst = out.data();
    const std::size_t hw = s.spatial();
    for (std::size_t c = 0; c < s.channels; ++c) {
        const std::size_t base = (c / u) * hw * u + c % u;
        const float* plane = src.data() + c * hw;
        for (std::size_t p = 0; p < hw; ++p) dst[base + p * u] = plane[p];
    }
    return out;
}

Tensor reorder_from_map_major(const Tensor& t) {
    if (!t.layout().is_map_major()) return t;
    const TensorShape& s = t.shape();
    const std::size_t u = t.layout().u;
    Tensor out(s, Layout::row_major());
    const auto src = t.data();
    auto dst = out.data();
    const std::size_t hw = s.spatial();
    for (std::size_t c = 0; c < s.channels; ++c) {
        const std::size_t base = (c / u) * hw * u + c % u;
        float* plane = dst.data() + c * hw;
        for (std::size_t p = 0; p < hw; ++p) plane[p] = src[base + p * u];
    }
    return out;
}

Tensor convert_layout(const Tensor& t, const Layout& target) {
    if (t.layout() == target) return t;
    if (!target.is_map_major()) return reorder_from_map_major(t);
    return reorder_to_map_major(t, target.u);
}

ParameterSet reorder_weights(const ParameterSet& p, const NetworkModel& model, std::size_t u) {
    if (u == 0) throw ShapeError("vector width must be >= 1");
    if (p.order().kind != ParameterOrder::Kind::Original) throw Error("reorder_weights expects original order");
    std::vector<LayerParameters> layers;
    layers.reserve(p.layers().size());
    for (const auto& lp : p.layers()) {
        const auto idx = model.find(lp.layer);
        if (!idx) throw Error("parameters for unknown layer '" + lp.layer + "'");
        const TensorShape bank = bank_shape(model, *idx);
        const std::size_t banks = model.layer(*idx).output_channels;
        const std::size_t in_bank = bank.elements();
        if (lp.weights.size() != banks * in_bank)
            throw ShapeError("layer '" + lp.layer + "': weight block has " + std::to_string(lp.weights.size()) +
                             " values, expected " + std::to_string(banks * in_bank));
        const std::size_t out_bank = storage_size(bank, Layout::map_major(u));
        LayerParameters r{lp.layer, std::vector<float>(banks * out_bank, 0.0f), lp.biases};
        for (std::size_t m = 0; m < banks; ++m) {
            const auto first = lp.weights.begin() + static_cast<std::ptrdiff_t>(m * in_bank);
            Tensor block(bank, Layout::row_major(), std::vector<float>(first, first + static_cast<std::ptrdiff_t>(in_bank)));
            const Tensor mm = reorder_to_map_major(block, u);
            std::copy(mm.data().begin(), mm.data().end(), r.weights.begin() + static_cast<std::ptrdiff_t>(m * out_bank));
        }
        layers.push_back(std::move(r));
    }
    return ParameterSet({ParameterOrder::Kind::Reordered, u}, std::move(layers));
}

ParameterSet restore_weights(const ParameterSet& p, const NetworkModel& model) {
    if (p.order().kind == ParameterOrder::Kind::Original) return p;
    const std::size_t u = p.order().u;
    std::vector<LayerParameters> layers;
    layers.reserve(p.layers().size());
    for (const auto& lp : p.layers()) {
        const auto idx = model.find(lp.layer);
        if (!idx) throw Error("parameters for unknown layer '" + lp.layer + "'");
        const TensorShape bank = bank_shape(model, *idx);
        const std::size_t banks = model.layer(*idx).output_channels;
        const std::size_t in_bank = storage_size(bank, Layout::map_major(u));
        if (lp.weights.size() != banks * in_bank)
            throw ShapeError("layer '" + lp.layer + "': reordered block has " + std::to_string(lp.weights.size()) +
                             " values, expected " + std::to_string(banks * in_bank));
        LayerParameters r{lp.layer, {}, lp.biases};
        r.weights.reserve(banks * bank.elements());
        for (std::size_t m = 0; m < banks; ++m) {
            const auto first = lp.weights.begin() + static_cast<std::ptrdiff_t>(m * in_bank);
            Tensor block(bank, Layout::map_major(u),
                         std::vector<float>(first, first + static_cast<std::ptrdiff_t>(in_bank)));
            const Tensor rm = reorder_from_map_major(block);
            r.weights.insert(r.weights.end(), rm.data().begin(), rm.data().end());
        }
        layers.push_back(std::move(r));
    }
    return ParameterSet({}, std::move(layers));
}

}  // namespace olpsynth
