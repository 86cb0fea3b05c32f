#include "robreg/app/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace robreg::app {

namespace {
constexpr std::uint64_t kRiskTag = 0x7269736b;
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t algorithm_index, std::size_t alpha_index,
                       std::size_t t_index, std::size_t repeat) {
    return derive_seed({base_seed, algorithm_index, alpha_index, t_index, repeat});
}

std::vector<GridCell> enumerate_grid(const ExperimentConfig& cfg) {
    std::vector<GridCell> cells;
    cells.reserve(cfg.algorithms.size() * cfg.alphas.size() * cfg.t_grid.size() * cfg.repeats);
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            for (std::size_t j = 0; j < cfg.t_grid.size(); ++j) {
                for (std::size_t r = 0; r < cfg.repeats; ++r) {
                    cells.push_back({cells.size(), a, i, j, r, run_seed(cfg.base_seed, a, i, j, r)});
                }
            }
        }
    }
    return cells;
}

ResultRow run_cell(const ExperimentConfig& cfg, const GridCell& cell, bool timing) {
    const auto& tmpl = cfg.algorithms.at(cell.algorithm_index);
    const double alpha = cfg.alphas.at(cell.alpha_index);
    const std::size_t T = cfg.t_grid.at(cell.t_index);
    const ProblemSpec spec = cell_spec(cfg, alpha);
    const OptimizerConfig opt = resolve_optimizer(tmpl, spec, T);

    SampleStream stream(spec, cell.seed);
    const RunResult run = run_optimizer(stream, opt, spec.mean());
    const McEstimate risk = excess_risk_mc(run.estimate, spec, cfg.n_mc, derive_seed({cell.seed, kRiskTag}));

    ResultRow row;
    row.run_id = cell.run_id;
    row.algorithm = tmpl.label;
    row.alpha = alpha;
    row.T = T;
    row.seed = cell.seed;
    row.est_error = estimation_error(run.estimate, spec.w_star);
    row.excess_risk = risk.estimate;
    row.excess_risk_se = risk.std_error;
    const bool strongly_convex = opt.algorithm != Algorithm::huber_uniform;
    if (has_guarantee(opt.algorithm) && (!strongly_convex || spec.rho > 0.0)) {
        row.bound = theoretical_bound(opt.algorithm, opt.ball.radius(), opt.huber.radius, alpha, spec.rho, T);
    }
    if (timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(run.wall_time).count();
    }
    return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& options) {
    const auto cells = enumerate_grid(cfg);
    std::vector<ResultRow> rows(cells.size());
    unsigned workers = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(cells.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                rows[i] = run_cell(cfg, cells[i], options.timing);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cells.size();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<MetricPoint> to_metric_points(const std::vector<ResultRow>& rows) {
    std::vector<MetricPoint> points;
    points.reserve(rows.size());
    for (const auto& r : rows) {
        points.push_back({r.algorithm, r.alpha, r.T, r.seed, r.est_error, r.excess_risk, r.excess_risk_se,
                          r.wall_ms.value_or(0.0)});
    }
    return points;
}

} // namespace robreg::app
