#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robreg/data.hpp"
#include "robreg/optimizers.hpp"

namespace robreg::app {

/// Invalid configuration. `line` and `column` are 1-based; 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, int line = 0, int column = 0);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }
    /// "<source>:<line>:<column>: <message>"
    std::string anchored(const std::string& source) const;

private:
    std::string message_;
    int line_;
    int column_;
};

enum class RadiusRule { bounded, subgaussian, explicit_radius };

struct HuberTemplate {
    RadiusRule rule = RadiusRule::bounded;
    double radius = 0.0;  // explicit_radius
    double kappa = 0.0;   // subgaussian
    bool operator==(const HuberTemplate&) const = default;
};

/// One algorithm of a sweep. T, alpha and (by default) lambda are filled per grid cell.
struct AlgorithmTemplate {
    Algorithm algorithm = Algorithm::huber_uniform;
    std::string label;  // CSV "algorithm" column; defaults to the algorithm name
    HuberTemplate huber;
    std::optional<double> ball;    // defaults to spec.D
    std::optional<double> lambda;  // defaults to (1 - alpha) rho
    std::optional<double> eta0;
    std::size_t trace_stride = 0;
    bool operator==(const AlgorithmTemplate&) const = default;
};

struct ExperimentConfig {
    ProblemSpec spec;
    std::vector<AlgorithmTemplate> algorithms;
    std::vector<std::size_t> t_grid;
    std::vector<double> alphas;
    std::size_t repeats = 1;
    std::uint64_t base_seed = 0;
    std::size_t n_mc = 100000;
    std::string output_path = "results.csv";
    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the YAML text of a sweep config. A `w_star_seed` key is resolved to an
/// explicit `w_star` drawn uniformly from the D-ball, so serialization freezes it.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Spec for one alpha cell of the grid.
ProblemSpec cell_spec(const ExperimentConfig& cfg, double alpha);

/// Concrete optimizer settings for one grid cell.
OptimizerConfig resolve_optimizer(const AlgorithmTemplate& tmpl, const ProblemSpec& spec, std::size_t T);

} // namespace robreg::app
