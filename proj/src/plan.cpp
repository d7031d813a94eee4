#include "olpsynth/plan.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "olpsynth/error.hpp"
#include "olpsynth/kernels.hpp"

namespace olpsynth {

bool LayerPlan::vectorized() const noexcept {
    return (kind == LayerKind::Conv || kind == LayerKind::FullyConnected) && mode != ArithmeticMode::Precise;
}

namespace {

bool layout_agnostic(LayerKind k) noexcept {
    return k == LayerKind::ReLU || k == LayerKind::MaxPool || k == LayerKind::AvgPool || k == LayerKind::Softmax;
}

}  // namespace

ExecutionPlan build_execution_plan(const NetworkModel& model, const PlanConfig& config) {
    if (!kernels::supported_width(config.u))
        throw PlanError("vector width u=" + std::to_string(config.u) + " must be a power of two <= 16");
    if (config.workers == 0) throw PlanError("worker count must be >= 1");
    if (config.modes.size() != 1 && config.modes.size() != model.size())
        throw PlanError("mode list has " + std::to_string(config.modes.size()) + " entries, network has " +
                        std::to_string(model.size()) + " layers");

    ExecutionPlan plan{config.u, config.workers, {}};
    plan.layers.resize(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        LayerPlan& lp = plan.layers[i];
        lp.name = model.layer(i).name;
        lp.kind = model.layer(i).kind;
        lp.mode = config.modes.size() == 1 ? config.modes.front() : config.modes[i];
        if (lp.kind == LayerKind::Input) lp.mode = ArithmeticMode::Precise;  // no arithmetic
        lp.u = config.u;
    }

    // Backward pass: does some consumer downstream (through layout-agnostic
    // layers) want map-major data?
    std::vector<bool> wants_map(model.size(), false);
    for (std::size_t k = model.size(); k-- > 0;) {
        for (std::size_t s : model.successor_indices(k)) {
            const LayerPlan& sp = plan.layers[s];
            if (sp.vectorized() || ((layout_agnostic(sp.kind) || sp.kind == LayerKind::Concat) && wants_map[s]))
                wants_map[k] = true;
        }
    }

    const Layout map = Layout::map_major(config.u), row = Layout::row_major();
    for (std::size_t i = 0; i < model.size(); ++i) {
        LayerPlan& lp = plan.layers[i];
        const auto& preds = model.predecessor_indices(i);
        switch (lp.kind) {
            case LayerKind::Input:
                lp.layout_in = row;
                lp.layout_out = wants_map[i] ? map : row;
                break;
            case LayerKind::Conv:
            case LayerKind::FullyConnected:
                lp.layout_in = lp.layout_out = lp.vectorized() ? map : row;
                break;
            case LayerKind::Concat: {
                std::vector<TensorShape> shapes;
                bool all_map = true;
                for (std::size_t p : preds) {
                    shapes.push_back(model.output_shape(p));
                    all_map = all_map && plan.layers[p].layout_out == map;
                }
                lp.layout_in = lp.layout_out = all_map && kernels::concat_stackable(shapes, config.u) ? map : row;
                break;
            }
            default:
                lp.layout_in = lp.layout_out = plan.layers[preds.front()].layout_out;
                break;
        }
        lp.alpha = lp.kind == LayerKind::Input ? 0 : storage_size(model.output_shape(i), lp.layout_out);
    }
    return plan;
}

ExecutionPlan reference_plan(const NetworkModel& model) {
    return build_execution_plan(model, {1, 1, {ArithmeticMode::Precise}});
}

void check_plan(const ExecutionPlan& plan, const NetworkModel& model) {
    if (plan.layers.size() != model.size())
        throw PlanError("plan has " + std::to_string(plan.layers.size()) + " layers, network has " +
                        std::to_string(model.size()));
    std::vector<ArithmeticMode> modes;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const LayerPlan& lp = plan.layers[i];
        const LayerSpec& l = model.layer(i);
        if (lp.name != l.name || lp.kind != l.kind)
            throw PlanError("plan layer " + std::to_string(i) + " is " + std::string(to_string(lp.kind)) + " '" +
                            lp.name + "', network has " + std::string(to_string(l.kind)) + " '" + l.name + "'");
        if (lp.u != plan.u)
            throw PlanError("layer '" + lp.name + "': u=" + std::to_string(lp.u) + " differs from plan u=" +
                            std::to_string(plan.u));
        modes.push_back(lp.mode);
    }
    const ExecutionPlan expected = build_execution_plan(model, {plan.u, plan.workers, modes});
    for (std::size_t i = 0; i < model.size(); ++i) {
        const LayerPlan& got = plan.layers[i];
        const LayerPlan& want = expected.layers[i];
        if (got.alpha != want.alpha)
            throw PlanError("layer '" + got.name + "': alpha=" + std::to_string(got.alpha) + ", network implies " +
                            std::to_string(want.alpha));
        if (got.layout_in != want.layout_in || got.layout_out != want.layout_out)
            throw PlanError("layer '" + got.name + "': layouts " + to_string(got.layout_in) + " -> " +
                            to_string(got.layout_out) + " disagree with " + to_string(want.layout_in) + " -> " +
                            to_string(want.layout_out));
    }
}

std::size_t boundary_reorders(const ExecutionPlan& plan, const NetworkModel& model) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < model.size(); ++i)
        for (std::size_t p : model.predecessor_indices(i))
            if (plan.layers.at(p).layout_out != plan.layers.at(i).layout_in) ++n;
    return n;
}

std::string write_plan(const ExecutionPlan& plan) {
    std::ostringstream out;
    out << "plan 1\n";
    out << "u " << plan.u << '\n';
    out << "workers " << plan.workers << '\n';
    for (const LayerPlan& lp : plan.layers)
        out << "layer " << lp.name << " kind=" << to_string(lp.kind) << " mode=" << to_string(lp.mode)
            << " u=" << lp.u << " alpha=" << lp.alpha << " in=" << to_string(lp.layout_in)
            << " out=" << to_string(lp.layout_out) << '\n';
    return out.str();
}

namespace {

std::size_t plan_int(std::string_view text, std::size_t line) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(line, "bad integer '" + std::string(text) + "' in plan");
    return v;
}

LayerKind plan_kind(std::string_view text, std::size_t line) {
    for (LayerKind k : {LayerKind::Input, LayerKind::Conv, LayerKind::ReLU, LayerKind::MaxPool, LayerKind::AvgPool,
                        LayerKind::FullyConnected, LayerKind::Softmax, LayerKind::Concat})
        if (to_string(k) == text) return k;
    throw ParseError(line, "unknown kind '" + std::string(text) + "' in plan");
}

}  // namespace

ExecutionPlan parse_plan(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    bool header = false, have_u = false, have_workers = false;
    ExecutionPlan plan;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& what) -> ParseError {
            return ParseError(line, "plan: " + what);
        };
        if (!header) {
            if (tok.size() != 2 || tok[0] != "plan") throw fail("expected 'plan 1' header");
            if (plan_int(tok[1], line) != 1) throw fail("unsupported plan version " + tok[1]);
            header = true;
        } else if (tok[0] == "u" && tok.size() == 2) {
            plan.u = plan_int(tok[1], line);
            have_u = true;
        } else if (tok[0] == "workers" && tok.size() == 2) {
            plan.workers = plan_int(tok[1], line);
            have_workers = true;
        } else if (tok[0] == "layer" && tok.size() >= 2) {
            LayerPlan lp;
            lp.name = tok[1];
            std::map<std::string, std::string> kv;
            for (std::size_t i = 2; i < tok.size(); ++i) {
                const auto eq = tok[i].find('=');
                if (eq == std::string::npos) throw fail("expected key=value, got '" + tok[i] + "'");
                kv[tok[i].substr(0, eq)] = tok[i].substr(eq + 1);
            }
            for (const char* key : {"kind", "mode", "u", "alpha", "in", "out"})
                if (!kv.contains(key)) throw fail("layer '" + lp.name + "' lacks " + key + "=");
            if (kv.size() != 6) throw fail("layer '" + lp.name + "' has unexpected keys");
            lp.kind = plan_kind(kv["kind"], line);
            const auto mode = parse_mode(kv["mode"]);
            if (!mode) throw fail("unknown mode '" + kv["mode"] + "'");
            lp.mode = *mode;
            lp.u = plan_int(kv["u"], line);
            lp.alpha = plan_int(kv["alpha"], line);
            try {
                lp.layout_in = parse_layout(kv["in"]);
                lp.layout_out = parse_layout(kv["out"]);
            } catch (const Error& e) {
                throw fail(e.what());
            }
            plan.layers.push_back(std::move(lp));
        } else {
            throw fail("unrecognised line");
        }
    }
    if (!header || !have_u || !have_workers) throw ParseError(0, "plan is missing its header, u or workers line");
    if (plan.workers == 0) throw PlanError("plan worker count must be >= 1");
    return plan;
}

ExecutionPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open plan '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_plan(ss.str());
}

void save_plan(const std::string& path, const ExecutionPlan& plan) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write plan '" + path + "'");
    out << write_plan(plan);
}

}  // namespace olpsynth
