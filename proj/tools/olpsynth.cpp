// Command-line driver: reorder, plan, analyze, run, bench.

#include <iostream>

#include "CLI11.hpp"
#include "olpsynth/cli.hpp"

int main(int argc, char** argv) {
    using namespace olpsynth;
    CLI::App app{"Synthesize and run map-major, output-parallel CNN inference programs"};
    app.require_subcommand(1);
    cli::Options o;

    auto add_net = [&](CLI::App* c) { c->add_option("--net", o.net, "Network description")->required(); };
    auto add_model = [&](CLI::App* c) { c->add_option("--model", o.model, "CPPO or CPPR parameter file")->required(); };
    auto add_u = [&](CLI::App* c) { c->add_option("--u", o.u, "Vector width (power of two <= 16)"); };

    auto* reorder = app.add_subcommand("reorder", "Write map-major (CPPR) parameters");
    add_net(reorder);
    add_model(reorder);
    add_u(reorder);
    reorder->add_option("--out", o.out, "Output CPPR file")->required();

    auto* plan = app.add_subcommand("plan", "Build an execution plan");
    add_net(plan);
    add_u(plan);
    plan->add_option("--workers", o.workers, "Worker threads");
    plan->add_option("--mode", o.mode, "precise|relaxed|imprecise, or a comma list with one per layer");
    plan->add_option("--out", o.out, "Plan file");

    auto* analyze = app.add_subcommand("analyze", "Pick per-layer arithmetic modes on a labeled dataset");
    add_net(analyze);
    add_model(analyze);
    add_u(analyze);
    analyze->add_option("--dataset", o.dataset, "CPPD dataset")->required();
    analyze->add_option("--tolerance", o.tolerance, "Allowed accuracy drop (fraction)");
    analyze->add_option("--workers", o.workers, "Worker threads");
    analyze->add_option("--out", o.out, "Plan file to write");
    analyze->add_option("--report", o.report, "Report file to write");

    auto* run = app.add_subcommand("run", "Run a plan on one input tensor");
    add_net(run);
    add_model(run);
    run->add_option("--plan", o.plans, "Plan file")->required();
    run->add_option("--input", o.input, "Input tensor (CPPD, one record)")->required();
    run->add_option("--out", o.out, "Output tensor file");
    run->add_option("--workers", o.workers_override, "Override the plan's worker count");

    auto* bench = app.add_subcommand("bench", "Time plans; the first is the baseline");
    add_net(bench);
    add_model(bench);
    bench->add_option("--plan", o.plans, "Plan file (repeatable)")->required();
    bench->add_option("--runs", o.runs, "Timed runs per plan");
    bench->add_option("--input", o.input, "Input tensor (random if omitted)");
    bench->add_option("--seed", o.seed, "Seed for the random input");
    bench->add_option("--out", o.out, "Report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? cli::kOk : cli::kBadInput;
    }

    if (*reorder) return cli::cmd_reorder(o, std::cout, std::cerr);
    if (*plan) return cli::cmd_plan(o, std::cout, std::cerr);
    if (*analyze) return cli::cmd_analyze(o, std::cout, std::cerr);
    if (*run) return cli::cmd_run(o, std::cout, std::cerr);
    return cli::cmd_bench(o, std::cout, std::cerr);
}
