#include "olpsynth/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "olpsynth/error.hpp"
#include "olpsynth/layout.hpp"
#include "parallel.hpp"

namespace olpsynth::kernels {

namespace {

struct ConvGeometry {
    std::size_t in_channels;   // N (logical)
    std::size_t out_channels;  // M (logical)
    std::size_t kernel, stride, padding;
    std::size_t in_h, in_w, out_h, out_w;
    std::size_t u;

    std::size_t in_stacks() const noexcept { return padded_channels(in_channels, u) / u; }
    std::size_t alpha() const noexcept { return padded_channels(out_channels, u) * out_h * out_w; }
};

/// Valid kernel taps [lo, hi) for an output position whose window starts at
/// `origin` (may be negative because of virtual zero padding).
struct TapRange {
    std::size_t lo, hi;
};

inline TapRange taps(long origin, std::size_t kernel, std::size_t extent) noexcept {
    const long lo = std::max<long>(0, -origin);
    const long hi = std::min<long>(static_cast<long>(kernel), static_cast<long>(extent) - origin);
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
}

// GCC vector extensions; the width has to be a literal, hence one
// specialization per supported u.
template <std::size_t U>
struct Vec;
#define OLPSYNTH_VEC(N)                                                          \
    template <>                                                                  \
    struct Vec<N> {                                                              \
        typedef float F __attribute__((vector_size(N * sizeof(float))));        \
        typedef std::uint32_t I __attribute__((vector_size(N * sizeof(float)))); \
    };
OLPSYNTH_VEC(1)
OLPSYNTH_VEC(2)
OLPSYNTH_VEC(4)
OLPSYNTH_VEC(8)
OLPSYNTH_VEC(16)
#undef OLPSYNTH_VEC

template <std::size_t U>
inline typename Vec<U>::F load(const float* p) noexcept {
    typename Vec<U>::F v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

/// Lane-wise flush_denormal. Casts between equally sized vector types
/// reinterpret the bits.
template <std::size_t U>
inline typename Vec<U>::F flush(typename Vec<U>::F v) noexcept {
    using I = typename Vec<U>::I;
    const I bits = (I)v;
    const I denormal = (I)((bits & 0x7f800000u) == 0);
    return (typename Vec<U>::F)(bits & ~(denormal & 0x7fffffffu));
}

template <bool Flush>
inline float F(float v) noexcept {
    if constexpr (Flush) return flush_denormal(v);
    else return v;
}

struct Window {
    long oh, ow;
    TapRange rh, rw;
};

inline Window window(const ConvGeometry& g, const OutputCoordinate& c) noexcept {
    const long oh = static_cast<long>(c.h * g.stride) - static_cast<long>(g.padding);
    const long ow = static_cast<long>(c.w * g.stride) - static_cast<long>(g.padding);
    return {oh, ow, taps(oh, g.kernel, g.in_h), taps(ow, g.kernel, g.in_w)};
}

// The block kernels below compute J output elements that share one input
// window (maps c.m .. c.m + J - 1 of one stack). Each element's arithmetic is
// exactly that of computing it alone; blocking only shares the input loads and
// interleaves the J dependency chains. Operands arrive already flushed when
// the mode flushes loads.

/// Channels one at a time in canonical n, kh, kw order.
template <bool Flush, std::size_t J>
void canonical_block(const ConvGeometry& g, const float* in, const float* weights, const float* biases,
                     const OutputCoordinate& c, float* out) noexcept {
    const std::size_t u = g.u, K = g.kernel;
    const std::size_t bank = g.in_stacks() * u * K * K;
    const Window win = window(g, c);
    const float* wbase = weights + c.m * bank;
    float acc[J];
    for (std::size_t j = 0; j < J; ++j) acc[j] = biases[c.m + j];
    for (std::size_t n = 0; n < g.in_channels; ++n) {
        const std::size_t s = n / u, lane = n % u;
        const float* plane = in + s * g.in_h * g.in_w * u + lane;
        const float* wplane = wbase + s * K * K * u + lane;
        for (std::size_t kh = win.rh.lo; kh < win.rh.hi; ++kh) {
            const float* irow = plane + static_cast<std::size_t>(win.oh + static_cast<long>(kh)) * g.in_w * u;
            const float* wrow = wplane + kh * K * u;
            for (std::size_t kw = win.rw.lo; kw < win.rw.hi; ++kw) {
                const float x = irow[static_cast<std::size_t>(win.ow + static_cast<long>(kw)) * u];
                for (std::size_t j = 0; j < J; ++j)
                    acc[j] = F<Flush>(acc[j] + F<Flush>(x * wrow[j * bank + kw * u]));
            }
        }
    }
    for (std::size_t j = 0; j < J; ++j) out[j] = acc[j];
}

/// U lane accumulators per element: lane l sums channel s*U + l over every
/// stack s and tap. Lane 0 starts at the bias, the others at -0; the lanes
/// are folded pairwise (l += l + U/2, then U/4, ...) at the end.
template <std::size_t U, std::size_t J>
void vector_block(const ConvGeometry& g, const float* in, const float* weights, const float* biases,
                  const OutputCoordinate& c, float* out) noexcept {
    using V = typename Vec<U>::F;
    const std::size_t K = g.kernel, stacks = g.in_stacks();
    const std::size_t bank = stacks * U * K * K;
    const Window win = window(g, c);
    const float* wbase = weights + c.m * bank;

    V acc[J];
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t l = 0; l < U; ++l) acc[j][l] = -0.0f;
        acc[j][0] = biases[c.m + j];
    }
    for (std::size_t s = 0; s < stacks; ++s) {
        const float* plane = in + s * g.in_h * g.in_w * U;
        const float* wplane = wbase + s * K * K * U;
        for (std::size_t kh = win.rh.lo; kh < win.rh.hi; ++kh) {
            const float* irow = plane + static_cast<std::size_t>(win.oh + static_cast<long>(kh)) * g.in_w * U;
            const float* wrow = wplane + kh * K * U;
            for (std::size_t kw = win.rw.lo; kw < win.rw.hi; ++kw) {
                const V x = load<U>(irow + static_cast<std::size_t>(win.ow + static_cast<long>(kw)) * U);
                for (std::size_t j = 0; j < J; ++j)
                    acc[j] = flush<U>(acc[j] + flush<U>(x * load<U>(wrow + j * bank + kw * U)));
            }
        }
    }
    for (std::size_t j = 0; j < J; ++j) {
        float lanes[U];
        std::memcpy(lanes, &acc[j], sizeof lanes);
        for (std::size_t width = U / 2; width > 0; width /= 2)
            for (std::size_t l = 0; l < width; ++l) lanes[l] = flush_denormal(lanes[l] + lanes[l + width]);
        out[j] = positive_zero(lanes[0]);
    }
}

/// Walks each worker's contiguous chunk of tasks. Where J consecutive tasks
/// are maps of one stack at one position, Block<J> computes them together;
/// any other task goes through Block<1>. Pad maps are written as zero.
template <std::size_t J, class Full, class Single>
void run_tasks(const ConvGeometry& g, float* out, std::size_t workers, Full full, Single single) {
    detail::parallel_chunks(g.alpha(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t x = begin; x < end;) {
            const OutputCoordinate c = coords_map_major_unchecked(x, g.u, g.out_w, g.out_h);
            if (J > 1 && c.m % J == 0 && x + J <= end && c.m + J <= g.out_channels) {
                full(c, out + x);
                x += J;
            } else {
                if (c.m < g.out_channels) single(c, out + x);
                else out[x] = 0.0f;
                ++x;
            }
        }
    });
}

template <bool Flush>
void run_canonical(const ConvGeometry& g, const float* in, const float* w, const float* b, float* out,
                   std::size_t workers) {
    auto single = [&](const OutputCoordinate& c, float* o) { canonical_block<Flush, 1>(g, in, w, b, c, o); };
    switch (g.u) {
        case 1: return run_tasks<1>(g, out, workers, single, single);
        case 2:
            return run_tasks<2>(g, out, workers,
                                [&](const OutputCoordinate& c, float* o) { canonical_block<Flush, 2>(g, in, w, b, c, o); },
                                single);
        default:
            return run_tasks<4>(g, out, workers,
                                [&](const OutputCoordinate& c, float* o) { canonical_block<Flush, 4>(g, in, w, b, c, o); },
                                single);
    }
}

template <std::size_t U>
void run_vector(const ConvGeometry& g, const float* in, const float* w, const float* b, float* out,
                std::size_t workers) {
    constexpr std::size_t J = U < 4 ? U : 4;
    run_tasks<J>(
        g, out, workers, [&](const OutputCoordinate& c, float* o) { vector_block<U, J>(g, in, w, b, c, o); },
        [&](const OutputCoordinate& c, float* o) { vector_block<U, 1>(g, in, w, b, c, o); });
}

std::vector<float> flushed(const float* p, std::size_t n) {
    std::vector<float> v(p, p + n);
    for (float& x : v) x = flush_denormal(x);
    return v;
}

void conv_map_major_raw(const ConvGeometry& g, const float* in, const float* weights, const float* biases,
                        float* out, ArithmeticMode mode, std::size_t workers) {
    if (mode == ArithmeticMode::Precise) return run_canonical<false>(g, in, weights, biases, out, workers);

    // Every load is flushed, so flush each operand once up front.
    const auto fin = flushed(in, g.in_stacks() * g.u * g.in_h * g.in_w);
    const auto fw = flushed(weights, g.out_channels * g.in_stacks() * g.u * g.kernel * g.kernel);
    const auto fb = flushed(biases, g.out_channels);
    if (mode == ArithmeticMode::Relaxed) return run_canonical<true>(g, fin.data(), fw.data(), fb.data(), out, workers);
    switch (g.u) {
        case 1: return run_vector<1>(g, fin.data(), fw.data(), fb.data(), out, workers);
        case 2: return run_vector<2>(g, fin.data(), fw.data(), fb.data(), out, workers);
        case 4: return run_vector<4>(g, fin.data(), fw.data(), fb.data(), out, workers);
        case 8: return run_vector<8>(g, fin.data(), fw.data(), fb.data(), out, workers);
        case 16: return run_vector<16>(g, fin.data(), fw.data(), fb.data(), out, workers);
        default: break;
    }
    throw ShapeError("unsupported vector width " + std::to_string(g.u));
}

void conv_row_major_raw(const ConvGeometry& g, const float* in, const float* weights, const float* biases,
                        float* out, std::size_t workers) {
    const std::size_t N = g.in_channels, K = g.kernel;
    const std::size_t alpha = g.out_channels * g.out_h * g.out_w;
    detail::parallel_for(alpha, workers, [&](std::size_t x) {
        const OutputCoordinate c = coords_row_major_unchecked(x, g.out_w, g.out_h);
        const long oh = static_cast<long>(c.h * g.stride) - static_cast<long>(g.padding);
        const long ow = static_cast<long>(c.w * g.stride) - static_cast<long>(g.padding);
        const TapRange rh = taps(oh, K, g.in_h), rw = taps(ow, K, g.in_w);
        const float* bank = weights + c.m * N * K * K;
        float acc = biases[c.m];
        for (std::size_t n = 0; n < N; ++n) {
            const float* plane = in + n * g.in_h * g.in_w;
            for (std::size_t kh = rh.lo; kh < rh.hi; ++kh) {
                const float* irow = plane + static_cast<std::size_t>(oh + static_cast<long>(kh)) * g.in_w;
                const float* wrow = bank + (n * K + kh) * K;
                for (std::size_t kw = rw.lo; kw < rw.hi; ++kw)
                    acc += irow[static_cast<std::size_t>(ow + static_cast<long>(kw))] * wrow[kw];
            }
        }
        out[x] = acc;
    });
}

ConvGeometry conv_geometry(const LayerSpec& layer, const TensorShape& in, std::size_t u) {
    if (layer.kind != LayerKind::Conv) throw ShapeError("layer '" + layer.name + "' is not a convolution");
    if (in.channels != layer.input_channels)
        throw ShapeError("layer '" + layer.name + "': input has " + std::to_string(in.channels) +
                         " channels, layer expects " + std::to_string(layer.input_channels));
    const auto oh = window_output(in.height, layer.kernel, layer.stride, layer.padding);
    const auto ow = window_output(in.width, layer.kernel, layer.stride, layer.padding);
    if (!oh || !ow) throw ShapeError("layer '" + layer.name + "': window does not fit input " + to_string(in));
    return {layer.input_channels, layer.output_channels, layer.kernel, layer.stride, layer.padding,
            in.height, in.width, *oh, *ow, u};
}

void check_params(const LayerSpec& layer, const LayerParameters& p, std::size_t weights) {
    if (p.weights.size() != weights || p.biases.size() != layer.output_channels)
        throw ShapeError("layer '" + layer.name + "': parameter block has " + std::to_string(p.weights.size()) +
                         " weights / " + std::to_string(p.biases.size()) + " biases, expected " +
                         std::to_string(weights) + " / " + std::to_string(layer.output_channels));
}

void check_map_major(const LayerSpec& layer, const Tensor& input) {
    if (!input.layout().is_map_major())
        throw ShapeError("layer '" + layer.name + "': vectorized path needs map-major input");
    if (!supported_width(input.layout().u))
        throw ShapeError("layer '" + layer.name + "': unsupported vector width " + std::to_string(input.layout().u));
}

}  // namespace

bool supported_width(std::size_t u) noexcept { return u == 1 || u == 2 || u == 4 || u == 8 || u == 16; }

Tensor conv_map_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                      ArithmeticMode mode, std::size_t workers) {
    check_map_major(layer, input);
    const ConvGeometry g = conv_geometry(layer, input.shape(), input.layout().u);
    check_params(layer, reordered, g.out_channels * g.in_stacks() * g.u * g.kernel * g.kernel);
    Tensor out({g.out_channels, g.out_h, g.out_w}, input.layout());
    conv_map_major_raw(g, input.data().data(), reordered.weights.data(), reordered.biases.data(),
                       out.data().data(), mode, workers);
    return out;
}

Tensor fc_map_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& reordered,
                    ArithmeticMode mode, std::size_t workers) {
    check_map_major(layer, input);
    const std::size_t u = input.layout().u;
    // The map-major storage stream of the input is the channel vector of a
    // 1x1 tensor, and the reordered weights follow the same stream.
    const std::size_t stream = input.size();
    const ConvGeometry g{stream, layer.output_channels, 1, 1, 0, 1, 1, 1, 1, u};
    check_params(layer, reordered, layer.output_channels * stream);
    Tensor out({layer.output_channels, 1, 1}, input.layout());
    conv_map_major_raw(g, input.data().data(), reordered.weights.data(), reordered.biases.data(),
                       out.data().data(), mode, workers);
    return out;
}

Tensor conv_row_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& original,
                      std::size_t workers) {
    if (input.layout().is_map_major())
        throw ShapeError("layer '" + layer.name + "': row-major path needs row-major input");
    const ConvGeometry g = conv_geometry(layer, input.shape(), 1);
    check_params(layer, original, g.out_channels * g.in_channels * g.kernel * g.kernel);
    Tensor out({g.out_channels, g.out_h, g.out_w}, Layout::row_major());
    conv_row_major_raw(g, input.data().data(), original.weights.data(), original.biases.data(), out.data().data(),
                       workers);
    return out;
}

Tensor fc_row_major(const LayerSpec& layer, const Tensor& input, const LayerParameters& original,
                    std::size_t workers) {
    if (input.layout().is_map_major())
        throw ShapeError("layer '" + layer.name + "': row-major path needs row-major input");
    const std::size_t n = input.shape().elements();
    const ConvGeometry g{n, layer.output_channels, 1, 1, 0, 1, 1, 1, 1, 1};
    check_params(layer, original, layer.output_channels * n);
    Tensor out({layer.output_channels, 1, 1}, Layout::row_major());
    conv_row_major_raw(g, input.data().data(), original.weights.data(), original.biases.data(), out.data().data(),
                       workers);
    return out;
}

Tensor relu(const Tensor& input, std::size_t workers) {
    Tensor out(input.shape(), input.layout());
    const float* in = input.data().data();
    float* dst = out.data().data();
    detail::parallel_for(input.size(), workers, [&](std::size_t i) { dst[i] = in[i] > 0.0f ? in[i] : 0.0f; });
    return out;
}

Tensor pool(const LayerSpec& layer, const Tensor& input, std::size_t workers) {
    if (layer.kind != LayerKind::MaxPool && layer.kind != LayerKind::AvgPool)
        throw ShapeError("layer '" + layer.name + "' is not a pooling layer");
    const TensorShape& in = input.shape();
    const auto oh = window_output(in.height, layer.kernel, layer.stride, 0);
    const auto ow = window_output(in.width, layer.kernel, layer.stride, 0);
    if (!oh || !ow) throw ShapeError("layer '" + layer.name + "': window does not fit input " + to_string(in));
    Tensor out({in.channels, *oh, *ow}, input.layout());
    const Layout lay = input.layout();
    const bool is_max = layer.kind == LayerKind::MaxPool;
    const std::size_t K = layer.kernel, S = layer.stride;
    const float area = static_cast<float>(K * K);
    float* dst = out.data().data();
    detail::parallel_for(out.size(), workers, [&](std::size_t x) {
        const OutputCoordinate c = lay.is_map_major() ? coords_map_major_unchecked(x, lay.u, *ow, *oh)
                                                      : coords_row_major_unchecked(x, *ow, *oh);
        if (c.m >= in.channels) {
            dst[x] = 0.0f;
            return;
        }
        float acc = is_max ? -std::numeric_limits<float>::infinity() : 0.0f;
        for (std::size_t kh = 0; kh < K; ++kh)
            for (std::size_t kw = 0; kw < K; ++kw) {
                const float v = input.at(c.m, c.h * S + kh, c.w * S + kw);
                acc = is_max ? std::max(acc, v) : acc + v;
            }
        dst[x] = is_max ? acc : acc / area;
    });
    return out;
}

Tensor softmax(const Tensor& input) {
    const TensorShape& s = input.shape();
    Tensor out(s, input.layout());
    float peak = -std::numeric_limits<float>::infinity();
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t h = 0; h < s.height; ++h)
            for (std::size_t w = 0; w < s.width; ++w) peak = std::max(peak, input.at(c, h, w));
    float sum = 0.0f;
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t h = 0; h < s.height; ++h)
            for (std::size_t w = 0; w < s.width; ++w) {
                const float e = std::exp(input.at(c, h, w) - peak);
                out.at(c, h, w) = e;
                sum += e;
            }
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t h = 0; h < s.height; ++h)
            for (std::size_t w = 0; w < s.width; ++w) out.at(c, h, w) /= sum;
    return out;
}

bool concat_stackable(std::span<const TensorShape> shapes, std::size_t u) noexcept {
    for (std::size_t i = 0; i + 1 < shapes.size(); ++i)
        if (shapes[i].channels % u != 0) return false;
    return true;
}

Tensor concat(std::span<const Tensor* const> inputs) {
    if (inputs.empty()) throw ShapeError("concat of nothing");
    const Layout lay = inputs.front()->layout();
    TensorShape s = inputs.front()->shape();
    s.channels = 0;
    std::vector<TensorShape> shapes;
    for (const Tensor* t : inputs) {
        if (t->layout() != lay) throw ShapeError("concat inputs disagree on layout");
        if (t->shape().height != s.height || t->shape().width != s.width)
            throw ShapeError("concat spatial mismatch: " + to_string(t->shape()) + " vs " + to_string(s));
        s.channels += t->shape().channels;
        shapes.push_back(t->shape());
    }
    if (lay.is_map_major() && !concat_stackable(shapes, lay.u))
        throw ShapeError("map-major concat needs every input but the last to fill whole channel stacks");
    std::vector<float> data;
    data.reserve(storage_size(s, lay));
    for (const Tensor* t : inputs) data.insert(data.end(), t->data().begin(), t->data().end());
    return Tensor(s, lay, std::move(data));
}

}  // namespace olpsynth::kernels
