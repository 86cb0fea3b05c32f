// Command-line front end: run / demo / plot.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robreg/app/commands.hpp"

using namespace robreg::app;

int main(int argc, char** argv) {
    CLI::App app{"Robust linear regression under oblivious contamination"};
    app.require_subcommand(1);

    unsigned threads = 0;
    std::optional<std::uint64_t> seed_override;
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    app.add_option("--seed-override", seed_override, "replace base_seed / demo seed");

    std::string config_path;
    bool no_timing = false;
    auto* run = app.add_subcommand("run", "run the experiment grid of a config file");
    run->add_option("config", config_path, "YAML config")->required();
    run->add_flag("--no-timing", no_timing, "leave wall_ms empty (byte-identical reruns)");

    std::string demo_name;
    DemoFlags demo_flags;
    auto* demo = app.add_subcommand("demo", "example21 | indistinguishable | decomposition");
    demo->add_option("name", demo_name)->required();
    demo->add_option("--C", demo_flags.C);
    demo->add_option("--alpha", demo_flags.alpha);
    demo->add_option("--T", demo_flags.T);
    demo->add_option("--seeds", demo_flags.seeds);
    demo->add_option("--seed", demo_flags.seed);
    demo->add_option("--points", demo_flags.points);
    demo->add_option("--n-mc", demo_flags.n_mc);
    demo->add_option("--tolerance", demo_flags.tolerance);

    std::string csv_path, out_path, y_metric = "est_error", group_by = "algorithm", x_axis = "T";
    bool linx = false, liny = false;
    auto* plot = app.add_subcommand("plot", "render CSV results to SVG, one file per alpha");
    plot->add_option("csv", csv_path)->required();
    plot->add_option("out", out_path)->required();
    plot->add_option("--y", y_metric)->check(CLI::IsMember({"est_error", "excess_risk"}));
    plot->add_option("--x", x_axis)->check(CLI::IsMember({"T"}));
    plot->add_option("--group-by", group_by)->check(CLI::IsMember({"algorithm"}));
    plot->add_flag("--linear-x", linx, "linear T axis");
    plot->add_flag("--linear-y", liny, "linear metric axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*run) {
        RunFlags flags;
        flags.threads = threads;
        flags.seed_override = seed_override;
        flags.timing = !no_timing;
        return cmd_run(config_path, flags, std::cout, std::cerr);
    }
    if (*demo) {
        if (seed_override) demo_flags.seed = seed_override;
        return cmd_demo(demo_name, demo_flags, std::cout, std::cerr);
    }
    PlotOptions options;
    options.y = y_metric == "excess_risk" ? PlotMetric::excess_risk : PlotMetric::est_error;
    options.logx = !linx;
    options.logy = !liny;
    return cmd_plot(csv_path, out_path, options, std::cout, std::cerr);
}
