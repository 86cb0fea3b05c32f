#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "robreg/app/svg_plot.hpp"

namespace robreg::app {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

struct RunFlags {
    unsigned threads = 0;
    std::optional<std::uint64_t> seed_override;
    bool timing = true;
};

int cmd_run(const std::string& config_path, const RunFlags& flags, std::ostream& out, std::ostream& err);

struct DemoFlags {
    // example21
    double C = 10.0;
    double alpha = 0.5;
    std::size_t T = 100000;
    std::size_t seeds = 10;
    std::optional<std::uint64_t> seed;
    // indistinguishable uses T, seed and alpha; decomposition uses points, n_mc, seed
    std::size_t points = 20;
    std::size_t n_mc = 100000;
    double tolerance = 4.0;
};

int cmd_demo(const std::string& name, const DemoFlags& flags, std::ostream& out, std::ostream& err);

int cmd_plot(const std::string& csv_path, const std::string& out_path, const PlotOptions& options, std::ostream& out,
             std::ostream& err);

} // namespace robreg::app
