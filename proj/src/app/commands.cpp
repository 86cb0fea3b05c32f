#include "robreg/app/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "robreg/app/config.hpp"
#include "robreg/app/csv.hpp"
#include "robreg/app/sweep.hpp"
#include "robreg/demos.hpp"
#include "robreg/errors.hpp"
#include "robreg/scenarios.hpp"

namespace robreg::app {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

void print_summary(std::ostream& out, const std::vector<ResultRow>& rows) {
    const auto points = to_metric_points(rows);
    const auto groups = aggregate_runs(points);

    char line[256];
    std::snprintf(line, sizeof line, "%-20s %7s %9s %4s %14s %12s %14s %12s %12s\n", "algorithm", "alpha", "T", "n",
                  "est_error", "+/-", "excess_risk", "+/-", "bound");
    out << line;
    for (const auto& g : groups) {
        std::optional<double> bound;
        for (const auto& r : rows) {
            if (r.algorithm == g.algorithm && r.alpha == g.alpha && r.T == g.T) {
                bound = r.bound;
                break;
            }
        }
        std::snprintf(line, sizeof line, "%-20s %7.4g %9zu %4zu %14.6g %12.4g %14.6g %12.4g %12s\n",
                      g.algorithm.c_str(), g.alpha, g.T, g.est_error.n, g.est_error.mean, g.est_error.half_width,
                      g.excess_risk.mean, g.excess_risk.half_width,
                      bound ? fmt("%.4g", *bound).c_str() : "-");
        out << line;
    }
}

} // namespace

int cmd_run(const std::string& config_path, const RunFlags& flags, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        err << e.anchored(config_path) << '\n';
        return kExitUsage;
    }
    if (flags.seed_override) cfg.base_seed = *flags.seed_override;

    try {
        SweepOptions options;
        options.threads = flags.threads;
        options.timing = flags.timing;
        const auto rows = run_sweep(cfg, options);
        write_results_atomic(cfg.output_path, rows);
        print_summary(out, rows);
        out << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_demo(const std::string& name, const DemoFlags& flags, std::ostream& out, std::ostream& err) {
    try {
        if (name == "example21") {
            const auto rep = demo_example_2_1(flags.C, flags.alpha, flags.T, flags.seeds, flags.seed.value_or(2101));
            out << "x uniform on {0, 2}, b = C/alpha with probability alpha\n";
            out << "  squared-loss SGD mean estimate  " << rep.l2_estimate_mean << "  (biased optimum w* + C/2 = "
                << rep.predicted_biased_optimum << ")\n";
            out << "  centered Huber SGD mean estimate " << rep.huber_estimate_mean << "  (w* = " << rep.w_star
                << ")\n";
            const bool ok = rep.passed();
            out << "C=" << format_double(rep.C) << '\n'
                << "alpha=" << format_double(rep.alpha) << '\n'
                << "T=" << rep.T << '\n'
                << "seeds=" << rep.seeds << '\n'
                << "w_star=" << format_double(rep.w_star) << '\n'
                << "l2_estimate_mean=" << format_double(rep.l2_estimate_mean) << '\n'
                << "predicted_biased_optimum=" << format_double(rep.predicted_biased_optimum) << '\n'
                << "huber_estimate_mean=" << format_double(rep.huber_estimate_mean) << '\n'
                << "passed=" << (ok ? 1 : 0) << '\n';
            return ok ? kExitOk : kExitRuntime;
        }
        if (name == "indistinguishable") {
            const auto rep = demo_indistinguishable(flags.T, flags.seed.value_or(401), flags.alpha);
            const bool ok = rep.tv_distance <= 0.02;
            out << "x = 1, responses under w* = -1 and w* = +1 with the -2 w* adversary\n";
            out << "  P(y = +1): " << rep.plus_frequency_first << " vs " << rep.plus_frequency_second << '\n';
            out << "T=" << rep.T << '\n'
                << "alpha=" << format_double(rep.alpha) << '\n'
                << "plus_frequency_first=" << format_double(rep.plus_frequency_first) << '\n'
                << "plus_frequency_second=" << format_double(rep.plus_frequency_second) << '\n'
                << "tv_distance_empirical=" << format_double(rep.tv_distance) << '\n'
                << "passed=" << (ok ? 1 : 0) << '\n';
            return ok ? kExitOk : kExitRuntime;
        }
        if (name == "decomposition") {
            ProblemSpec spec = scenarios::uniform_box_experiment(0.3);
            spec.corruption.conditional = GaussianCorruption{10.0};
            const auto rep = demo_decomposition(spec, flags.points, flags.n_mc, flags.seed.value_or(303),
                                                flags.tolerance);
            out << "L_R(w) against (1 - alpha) F(w) + alpha H(w) at " << rep.points << " random points\n";
            out << "  within " << rep.tolerance << " standard errors: " << rep.within << '/' << rep.points << '\n';
            out << "points=" << rep.points << '\n'
                << "within=" << rep.within << '\n'
                << "worst_ratio=" << format_double(rep.worst_ratio) << '\n'
                << "tolerance=" << format_double(rep.tolerance) << '\n'
                << "passed=" << (rep.passed() ? 1 : 0) << '\n';
            return rep.passed() ? kExitOk : kExitRuntime;
        }
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    err << "unknown demo '" << name << "' (expected example21, indistinguishable or decomposition)\n";
    return kExitUsage;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path, const PlotOptions& options, std::ostream& out,
             std::ostream& err) {
    if (!std::filesystem::is_regular_file(csv_path)) {
        err << csv_path << ": no such file\n";
        return kExitUsage;
    }
    std::vector<ResultRow> rows;
    try {
        rows = read_results_file(csv_path);
    } catch (const CsvSchemaError& e) {
        err << csv_path << ": " << e.what();
        if (!e.missing().empty()) {
            err << " (missing:";
            for (const auto& m : e.missing()) err << ' ' << m;
            err << ')';
        }
        err << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    if (rows.empty()) {
        err << csv_path << ": no data rows\n";
        return kExitUsage;
    }
    try {
        for (const auto& f : build_plots(rows, out_path, options)) {
            const std::filesystem::path p(f.path);
            const auto tmp = p.string() + ".tmp";
            {
                std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
                if (!os) throw std::runtime_error("cannot write " + tmp);
                os << f.svg;
                if (!os.flush()) throw std::runtime_error("write failed: " + tmp);
            }
            std::filesystem::rename(tmp, p);
            out << "wrote " << f.path << " (alpha=" << f.alpha << ", " << f.curves << " curves)\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace robreg::app
