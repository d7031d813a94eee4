#include "olpsynth/cli.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>

#include "binary_io.hpp"
#include "olpsynth/analyzer.hpp"
#include "olpsynth/bench.hpp"
#include "olpsynth/dataset.hpp"
#include "olpsynth/engine.hpp"
#include "olpsynth/error.hpp"
#include "olpsynth/layout.hpp"
#include "olpsynth/plan.hpp"
#include "olpsynth/validate.hpp"

namespace olpsynth::cli {

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        body();
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw Error(std::string("missing required flag ") + flag);
}

std::vector<ArithmeticMode> parse_modes(const std::string& text) {
    std::vector<ArithmeticMode> modes;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto m = parse_mode(item);
        if (!m) throw Error("unknown mode '" + item + "' (expected precise, relaxed or imprecise)");
        modes.push_back(*m);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return modes;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
}

void print_timings(std::ostream& out, const RunResult& r) {
    out << std::fixed << std::setprecision(4);
    for (const auto& t : r.timings) out << "layer " << t.layer << " ms=" << t.ms << '\n';
    out << "total ms=" << r.total_ms() << '\n';
}

}  // namespace

int cmd_reorder(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(o.net, "--net");
        require(o.model, "--model");
        require(o.out, "--out");
        if (o.u == 0) throw Error("--u must be >= 1");
        const NetworkModel model = load_network(o.net);
        const ParameterSet params = load_parameters(o.model, model);
        require_valid(model, params);
        const ParameterSet reordered = reorder_weights(restore_weights(params, model), model, o.u);
        detail::write_file(o.out, write_reordered_parameters(reordered));
        out << "wrote " << o.out << " u=" << o.u << " layers=" << reordered.layers().size()
            << " floats=" << reordered.total_floats() << '\n';
    });
}

int cmd_plan(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(o.net, "--net");
        const NetworkModel model = load_network(o.net);
        const ExecutionPlan plan = build_execution_plan(model, {o.u, o.workers, parse_modes(o.mode)});
        const std::string text = write_plan(plan);
        if (!o.out.empty()) write_text(o.out, text);
        out << text;
    });
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(o.net, "--net");
        require(o.model, "--model");
        require(o.dataset, "--dataset");
        const NetworkModel model = load_network(o.net);
        const ParameterSet params = load_parameters(o.model, model);
        const LabeledDataset dataset = load_dataset(o.dataset);
        const ModeAssignment a = select_modes(model, params, dataset, o.tolerance, {o.u, o.workers});
        const std::string report = format_report(a);
        if (!o.report.empty()) write_text(o.report, report);
        if (!o.out.empty()) save_plan(o.out, plan_for(model, a, o.u, o.workers));
        out << report;
    });
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(o.net, "--net");
        require(o.model, "--model");
        require(o.input, "--input");
        if (o.plans.size() != 1) throw Error("run takes exactly one --plan");
        const NetworkModel model = load_network(o.net);
        const ParameterSet params = load_parameters(o.model, model);
        ExecutionPlan plan = load_plan(o.plans.front());
        if (o.workers_override) plan.workers = *o.workers_override;
        const Executor exec(std::move(plan), model, params);
        const RunResult r = exec.run(load_tensor(o.input));
        if (!o.out.empty()) save_tensor(o.out, r.output);
        print_timings(out, r);
    });
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        require(o.net, "--net");
        require(o.model, "--model");
        if (o.plans.empty()) throw Error("bench needs at least one --plan");
        if (o.runs < 3) throw Error("--runs must be >= 3, got " + std::to_string(o.runs));
        const NetworkModel model = load_network(o.net);
        const ParameterSet params = load_parameters(o.model, model);

        Tensor input;
        if (!o.input.empty()) {
            input = load_tensor(o.input);
        } else {
            input = Tensor(model.network_input_shape(), Layout::row_major());
            std::mt19937_64 rng(o.seed);
            std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
            for (float& v : input.data()) v = dist(rng);
        }

        std::vector<std::unique_ptr<Executor>> owned;
        std::vector<const Executor*> programs;
        for (const auto& path : o.plans) {
            owned.push_back(std::make_unique<Executor>(load_plan(path), model, params));
            programs.push_back(owned.back().get());
        }
        const BenchReport report = run_bench(programs, o.plans, input, o.runs);
        const std::string text = format_report(report);
        if (!o.out.empty()) write_text(o.out, text);
        out << text;
    });
}

}  // namespace olpsynth::cli
