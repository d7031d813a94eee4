// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "olpsynth/analyzer.hpp"
#include "olpsynth/bench.hpp"
#include "olpsynth/engine.hpp"
#include "olpsynth/kernels.hpp"
#include "olpsynth/layout.hpp"
#include "olpsynth/plan.hpp"
#include "olpsynth/reference.hpp"
#include "oracles.hpp"

using namespace olpsynth;

namespace {

enum class Verdict { Pass, Fail, NotApplicable };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.verdict != Verdict::NotApplicable && limit_s > 0 && s >= limit_s) {
        o.verdict = Verdict::Fail;
        o.detail += " (over time limit " + std::to_string(limit_s) + " s)";
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "N/A ";
    if (o.verdict == Verdict::Fail) ++failures;
    std::printf("[%s] #%d %s: %s [%.2f s]\n", tag, id, title, o.detail.c_str(), s);
    std::fflush(stdout);
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

NetworkModel single_conv_model(const LayerSpec& l, std::size_t h, std::size_t w) {
    return parse_network_description("input " + std::to_string(l.input_channels) + " " + std::to_string(h) + " " +
                                     std::to_string(w) + "\nconv " + l.name + " pred=input N=" +
                                     std::to_string(l.input_channels) + " M=" + std::to_string(l.output_channels) +
                                     " K=" + std::to_string(l.kernel) + " S=" + std::to_string(l.stride) +
                                     " P=" + std::to_string(l.padding) + "\n");
}

struct ConvCase {
    LayerSpec layer;
    Tensor input;
    LayerParameters params;
};

ConvCase random_conv(std::mt19937& rng, std::uint64_t seed) {
    const std::size_t ks[] = {1, 3, 5};
    std::uniform_int_distribution<std::size_t> ch(1, 16), sp(1, 14);
    while (true) {
        const std::size_t n = ch(rng), m = ch(rng), k = ks[rng() % 3], s = 1 + rng() % 2, p = rng() % 2;
        const std::size_t h = sp(rng), w = sp(rng);
        if (!window_output(h, k, s, p) || !window_output(w, k, s, p)) continue;
        LayerSpec l = fixtures::conv("c", n, m, k, s, p);
        return {l, fixtures::random_tensor({n, h, w}, seed), fixtures::random_params(l, seed ^ 0x9e3779b9u)};
    }
}

Tensor run_vectorized(const ConvCase& c, std::size_t u, ArithmeticMode mode, std::size_t workers) {
    const auto model = single_conv_model(c.layer, c.input.shape().height, c.input.shape().width);
    const auto r = reorder_weights(ParameterSet({}, {c.params}), model, u);
    return run_layer_vectorized(c.layer, reorder_to_map_major(c.input, u), r.layers()[0], mode, workers);
}

Outcome index_map() {
    std::size_t grids = 0, mismatches = 0;
    for (std::size_t u : {1u, 2u, 4u, 8u})
        for (std::size_t mult : {1u, 2u, 3u})
            for (std::size_t hout : {1u, 2u, 3u, 5u})
                for (std::size_t wout : {1u, 2u, 3u, 5u}) {
                    const std::size_t mp = mult * u;
                    const auto order = oracle::map_major_write_order(mp, hout, wout, u);
                    const std::size_t alpha = mp * hout * wout;
                    for (std::size_t x = 0; x < alpha; ++x)
                        if (!(coords_map_major({x, alpha}, u, wout, hout) == order[x])) ++mismatches;
                    ++grids;
                }
    return verdict(mismatches == 0, std::to_string(grids) + " grids, " + std::to_string(mismatches) + " mismatches");
}

Outcome round_trip() {
    std::mt19937 rng(2);
    std::size_t bad = 0, wrong_image = 0;
    for (int i = 0; i < 200; ++i) {
        const TensorShape s{1 + rng() % 17, 1 + rng() % 9, 1 + rng() % 9};
        const std::size_t us[] = {1, 4, 8};
        const std::size_t u = us[i % 3];
        const Tensor t = fixtures::random_tensor(s, 1000 + static_cast<std::uint64_t>(i));
        const Tensor m = reorder_to_map_major(t, u);
        const std::vector<float> rm(t.data().begin(), t.data().end());
        if (!fixtures::bitwise_equal(m.data(), oracle::permute_to_map_major(rm, s.channels, s.height, s.width, u)))
            ++wrong_image;
        const Tensor back = reorder_from_map_major(m);
        if (back.layout() != Layout::row_major() || !fixtures::bitwise_equal(back.data(), t.data())) ++bad;
    }
    return verdict(bad == 0 && wrong_image == 0, "200 tensors, " + std::to_string(bad) + " round-trip failures, " +
                                                     std::to_string(wrong_image) + " permutation mismatches");
}

Outcome conv_oracle() {
    std::mt19937 rng(3);
    std::size_t cases = 0, bitwise_fail = 0, oracle_fail = 0, tol_fail = 0;
    double worst = 0.0;
    for (int i = 0; i < 520; ++i) {
        const ConvCase c = random_conv(rng, 5000 + static_cast<std::uint64_t>(i));
        const Tensor ref = reference::conv2d(c.layer, c.input, c.params);
        std::size_t oh = 0, ow = 0;
        const auto direct = oracle::direct_conv(std::vector<float>(c.input.data().begin(), c.input.data().end()),
                                                c.layer.input_channels, c.input.shape().height,
                                                c.input.shape().width, c.params.weights, c.params.biases,
                                                c.layer.output_channels, c.layer.kernel, c.layer.stride,
                                                c.layer.padding, oh, ow);
        if (fixtures::max_relative_error(ref.data(), direct) > 1e-6) ++oracle_fail;
        if (!fixtures::bitwise_equal(reorder_from_map_major(run_vectorized(c, 1, ArithmeticMode::Relaxed, 2)).data(),
                                     ref.data()))
            ++bitwise_fail;
        for (std::size_t u : {4u, 8u}) {
            const Tensor out = run_vectorized(c, u, ArithmeticMode::Imprecise, 2);
            const double e = fixtures::max_relative_error(reorder_from_map_major(out).data(), ref.data());
            worst = std::max(worst, e);
            if (e > 1e-5) ++tol_fail;
        }
        ++cases;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", worst);
    return verdict(bitwise_fail == 0 && tol_fail == 0 && oracle_fail == 0,
                   std::to_string(cases) + " cases; u=1 relaxed bitwise failures " + std::to_string(bitwise_fail) +
                       "; u=4,8 imprecise over 1e-5: " + std::to_string(tol_fail) + " (worst " + buf +
                       "); reference vs padded oracle failures " + std::to_string(oracle_fail));
}

Outcome zero_overhead() {
    const auto model = parse_network_description(R"(input 3 17 17
conv c1 pred=input N=3 M=10 K=3 S=1 P=1
conv c2 pred=c1 N=10 M=7 K=5 S=2 P=1
)");
    const auto params = random_parameters(model, 4);
    const Tensor x = fixtures::random_tensor(model.network_input_shape(), 5);
    const Executor exec(build_execution_plan(model, {4, 2, {ArithmeticMode::Imprecise}}), model, params);
    const RunResult r = exec.run(x, {.keep_layer_outputs = true});
    const Tensor c1 = reference::conv2d(model.layer(1), x, params.for_layer("c1"));
    const double e = fixtures::max_relative_error(r.layer_outputs[1].data(), reorder_to_map_major(c1, 4).data());
    const bool layout_ok = r.layer_outputs[1].layout() == Layout::map_major(4);
    char buf[160];
    std::snprintf(buf, sizeof buf, "entry=%zu inter=%zu exit=%zu, intermediate map-major=%s rel err %.3g",
                  r.reorders.entry, r.reorders.inter_layer, r.reorders.exit, layout_ok ? "yes" : "no", e);
    return verdict(r.reorders.entry == 1 && r.reorders.inter_layer == 0 && r.reorders.exit == 1 && layout_ok &&
                       e <= 1e-5,
                   buf);
}

Outcome determinism() {
    std::mt19937 rng(6);
    std::size_t diffs = 0;
    for (int i = 0; i < 50; ++i) {
        const ConvCase c = random_conv(rng, 7000 + static_cast<std::uint64_t>(i));
        const std::size_t u = (i % 2) ? 4 : 8;
        for (ArithmeticMode mode : {ArithmeticMode::Relaxed, ArithmeticMode::Imprecise}) {
            const Tensor one = run_vectorized(c, u, mode, 1);
            for (std::size_t w : {2u, 8u})
                if (!fixtures::bitwise_equal(one.data(), run_vectorized(c, u, mode, w).data())) ++diffs;
        }
    }
    return verdict(diffs == 0, "50 layers x {relaxed, imprecise}, " + std::to_string(diffs) + " differences");
}

Outcome mode_semantics() {
    const LayerSpec l = fixtures::conv("c", 1, 1, 1);
    const ConvCase den{l, Tensor({1, 1, 1}, Layout::row_major(), {1e-40f}), {"c", {1.0f}, {0.0f}}};
    const float p = run_vectorized(den, 1, ArithmeticMode::Precise, 1).data()[0];
    const float r = run_vectorized(den, 1, ArithmeticMode::Relaxed, 1).data()[0];
    const float i4 = run_vectorized(den, 4, ArithmeticMode::Imprecise, 1).data()[0];
    const ConvCase nz{l, Tensor({1, 1, 1}, Layout::row_major(), {0.0f}), {"c", {-1.0f}, {-0.0f}}};
    const float pz = run_vectorized(nz, 1, ArithmeticMode::Precise, 1).data()[0];
    const float iz = run_vectorized(nz, 4, ArithmeticMode::Imprecise, 1).data()[0];
    const bool ok = p == 1e-40f && std::bit_cast<std::uint32_t>(r) == 0 && std::bit_cast<std::uint32_t>(i4) == 0 &&
                    std::bit_cast<std::uint32_t>(pz) == 0x80000000u && std::bit_cast<std::uint32_t>(iz) == 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "precise=%g relaxed=%g imprecise=%g; -0 case precise=%g imprecise=%g", p, r, i4,
                  pz, iz);
    return verdict(ok, buf);
}

Outcome analyzer() {
    const auto model = parse_network_description(fixtures::kHarmlessNet);
    const auto params = random_parameters(model, 8);
    const auto ds = fixtures::self_labeled(model, params, 100, 10'000);
    const auto a = select_modes(model, params, ds, 0.0);
    std::size_t imprecise = 0;
    for (const auto& l : a.layers)
        if (l.candidate && l.mode == ArithmeticMode::Imprecise) ++imprecise;
    const bool harmless_ok = imprecise == model.size() - 1;

    const auto pm = parse_network_description(fixtures::kPoisonNet);
    const auto b = select_modes(pm, fixtures::poison_params(), fixtures::poison_dataset(), 0.0);
    const bool poison_ok = b.layers[1].mode == ArithmeticMode::Imprecise && b.layers[2].mode != ArithmeticMode::Imprecise;
    return verdict(harmless_ok && poison_ok,
                   "micro-net " + std::to_string(imprecise) + "/" + std::to_string(model.size() - 1) +
                       " layers imprecise; adversarial net c1=" + std::string(to_string(b.layers[1].mode)) +
                       " c2=" + std::string(to_string(b.layers[2].mode)));
}

Outcome bench_protocol() {
    const std::vector<double> v{5.0, 1.0, 9.0};
    const double t = trimmed_mean(v);
    // One extreme on each side must be dropped whatever the order and spread.
    std::mt19937 rng(9);
    std::size_t bad = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<double> d(3 + rng() % 98);
        for (double& x : d) x = 1.0 + static_cast<double>(rng() % 1000);
        auto sorted = d;
        std::sort(sorted.begin(), sorted.end());
        double sum = 0.0;
        for (std::size_t k = 1; k + 1 < sorted.size(); ++k) sum += sorted[k];
        const double expected = sum / static_cast<double>(sorted.size() - 2);
        if (std::abs(trimmed_mean(d) - expected) > 1e-9 * expected) ++bad;
    }
    return verdict(t == 5.0 && bad == 0,
                   "trimmed_mean([5,1,9])=" + std::to_string(t) + ", " + std::to_string(bad) + "/200 random mismatches");
}

Outcome speedup() {
    const unsigned threads = std::thread::hardware_concurrency();
    const auto model = parse_network_description("input 3 227 227\nconv conv1 pred=input N=3 M=96 K=11 S=4 P=0\n");
    const auto params = random_parameters(model, 10);
    const Tensor x = fixtures::random_tensor(model.network_input_shape(), 11);
    const std::size_t workers = std::max(1u, threads);
    const Executor ref(reference_plan(model), model, params);
    const Executor fast(build_execution_plan(model, {4, workers, {ArithmeticMode::Imprecise}}), model, params);
    const Executor* programs[] = {&ref, &fast};
    const std::string labels[] = {"reference", "imprecise-u4"};
    const std::size_t runs = threads >= 4 ? 100 : 10;
    const auto r = run_bench(programs, labels, x, runs);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%u hardware threads, %zu runs: reference %.2f ms, parallel imprecise %.2f ms, %.2fx",
                  threads, runs, r.entries[0].trimmed_mean_ms, r.entries[1].trimmed_mean_ms, r.entries[1].speedup);
    if (threads < 4) return {Verdict::NotApplicable, std::string(buf) + " (needs >= 4 hardware threads)"};
    return verdict(r.entries[1].speedup > 2.0, buf);
}

}  // namespace

int main() {
    report(1, "index map oracle", 1.0, index_map);
    report(2, "reorder round trip", 5.0, round_trip);
    report(3, "convolution oracle equivalence", 60.0, conv_oracle);
    report(4, "zero-overhead chain", 0.0, zero_overhead);
    report(5, "determinism across workers", 0.0, determinism);
    report(6, "mode semantics", 0.0, mode_semantics);
    report(7, "analyzer mode selection", 30.0, analyzer);
    report(8, "bench protocol", 0.0, bench_protocol);
    report(9, "desktop speedup floor", 300.0, speedup);
    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
