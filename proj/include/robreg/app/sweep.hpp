#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robreg/app/config.hpp"
#include "robreg/app/csv.hpp"
#include "robreg/evaluation.hpp"

namespace robreg::app {

struct GridCell {
    std::size_t run_id = 0;
    std::size_t algorithm_index = 0;
    std::size_t alpha_index = 0;
    std::size_t t_index = 0;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
};

/// Per-run seed: derive_seed({base_seed, algorithm index, alpha index, T index, repeat}).
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t algorithm_index, std::size_t alpha_index,
                       std::size_t t_index, std::size_t repeat);

/// Grid in output order: algorithm, then alpha, then T, then repeat.
std::vector<GridCell> enumerate_grid(const ExperimentConfig& cfg);

struct SweepOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
    bool timing = true;    // false leaves wall_ms empty so reruns are byte-identical
};

ResultRow run_cell(const ExperimentConfig& cfg, const GridCell& cell, bool timing);

/// Runs every cell on a worker pool; rows come back in grid order.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {});

std::vector<MetricPoint> to_metric_points(const std::vector<ResultRow>& rows);

} // namespace robreg::app
