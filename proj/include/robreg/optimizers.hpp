#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "robreg/data.hpp"
#include "robreg/huber.hpp"

namespace robreg {

enum class Algorithm {
    huber_uniform,         // fixed step, uniform average, no centering
    huber_known_mean,      // 1/(lambda t) steps, centered by the true mean, suffix average
    huber_unknown_mean,    // as above, centered by the mean of T held-out samples
    huber_streaming_mean,  // centered by the running mean of earlier samples, eta0/t steps
    huber_noncentered,     // baseline: huber_known_mean with a zero center and eta0/t steps
    l2_sgd,                // baseline: squared loss, no clipping or centering
};

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::huber_uniform;
    std::size_t T = 2;
    HuberParams huber;
    BallConstraint ball{1.0};
    /// Strong-convexity modulus (1 - alpha) rho; drives the 1/(lambda t) steps.
    double lambda = 0.0;
    /// Base of eta0/t steps. Defaults to 1/lambda.
    std::optional<double> eta0;
    /// Record w_t whenever t % trace_stride == 0. Zero disables tracing.
    std::size_t trace_stride = 0;

    void validate() const;
    double step_base() const;
};

struct TracePoint {
    std::size_t t = 0;
    Vector w;
};

struct RunResult {
    Vector estimate;
    std::vector<TracePoint> trace;
    std::size_t samples_consumed = 0;
    std::chrono::nanoseconds wall_time{0};
    /// Feature center in use when the run finished (absent for uncentered algorithms).
    std::optional<Vector> center;
};

/// Sees every stochastic gradient g_t before it is applied.
using GradientObserver = std::function<void(std::size_t t, const Vector& g)>;

/// Mean of the last ceil(n/2) iterates.
Vector suffix_average(std::span<const Vector> iterates);

RunResult huber_sgd_uniform(ObservationSource& stream, const OptimizerConfig& cfg,
                            const GradientObserver& observe = {});
RunResult huber_sgd_known_mean(ObservationSource& stream, const OptimizerConfig& cfg, const Vector& mean,
                               const GradientObserver& observe = {});
RunResult huber_sgd_unknown_mean(ObservationSource& stream, const OptimizerConfig& cfg,
                                 const GradientObserver& observe = {});
RunResult huber_sgd_streaming_mean(ObservationSource& stream, const OptimizerConfig& cfg,
                                   const GradientObserver& observe = {});
RunResult huber_sgd_noncentered(ObservationSource& stream, const OptimizerConfig& cfg,
                                const GradientObserver& observe = {});
RunResult l2_sgd(ObservationSource& stream, const OptimizerConfig& cfg, const GradientObserver& observe = {});

/// Dispatch on cfg.algorithm. `mean` is required for huber_known_mean only.
RunResult run_optimizer(ObservationSource& stream, const OptimizerConfig& cfg,
                        const std::optional<Vector>& mean = std::nullopt,
                        const GradientObserver& observe = {});

/// Samples an algorithm reads for a given horizon (2T for the two-phase method).
std::size_t samples_required(Algorithm a, std::size_t T);

} // namespace robreg
