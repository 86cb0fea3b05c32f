#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robreg/data.hpp"
#include "robreg/optimizers.hpp"

namespace robreg {

/// ||w - w*||^2.
double estimation_error(const Vector& w, const Vector& w_star);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Running mean and variance (Welford). Constant inputs give their value back exactly.
class MeanAccumulator {
public:
    void add(double v);
    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance; zero with fewer than two points.
    double variance() const noexcept;
    McEstimate estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// F(w) - F(w*) over the clean law, paired on common (x, eps) draws:
/// mean of (<w - w*, x> - eps)^2 / 2 - eps^2 / 2. Exactly zero at w = w*.
McEstimate excess_risk_mc(const Vector& w, const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed);

/// F(w) = E[(<w, x> - y)^2 / 2] over clean draws.
McEstimate clean_loss_mc(const Vector& w, const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed);

/// L_R(w) = E[h_R(<w, x> - y)] over the contaminated mixture.
McEstimate huber_population_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                    std::uint64_t seed);

/// H(w) = E[h_R(<w - w*, x> - eps - b) | b != 0], drawn with the gate forced open.
McEstimate corrupted_huber_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                   std::uint64_t seed);

/// L_R(w) - L_R(w*) paired on common contaminated draws.
McEstimate huber_excess_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                std::uint64_t seed);

struct DecompositionCheck {
    McEstimate L;
    McEstimate F;
    McEstimate H;
    double residual = 0.0;     // L - ((1 - alpha) F + alpha H)
    double combined_se = 0.0;  // independent pieces, so variances add
    bool within(double k) const { return std::abs(residual) <= k * combined_se; }
};

/// Compares L_R(w) with (1 - alpha) F(w) + alpha H(w) from three independent MC runs.
DecompositionCheck decomposition_check(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                       std::uint64_t seed);

/// Closed-form guarantee for an algorithm that has one.
///   huber_uniform:      R D / ((1 - alpha) sqrt(T))            (excess risk)
///   huber_known_mean:   72 R^2 / (((1 - alpha) rho)^2 T)       (estimation error)
///   huber_unknown_mean: the above times (2 log T + 1)
/// Throws ContractError for the baselines and the streaming variant.
double theoretical_bound(Algorithm a, double D, double R, double alpha, double rho, std::size_t T);

/// Estimation-error guarantee for the two-phase method under sub-Gaussian data:
/// (D^2/14 + 288 R^2 (2 log T + 1) / ((1 - alpha) rho)^2) / T.
double theoretical_bound_subgaussian(double D, double R, double alpha, double rho, std::size_t T);

bool has_guarantee(Algorithm a);

struct RateFit {
    std::vector<std::pair<double, double>> points;  // (log T, log error)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of log(error) on log(T). Needs >= 3 distinct T and positive errors.
RateFit rate_fit(std::span<const std::pair<double, double>> t_and_error);

struct MetricPoint {
    std::string algorithm;
    double alpha = 0.0;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    double est_error = 0.0;
    double excess_risk = 0.0;
    double excess_risk_se = 0.0;
    double wall_ms = 0.0;
};

struct MeanCi {
    std::size_t n = 0;
    double mean = 0.0;
    double half_width = 0.0;  // 1.96 sd / sqrt(n); NaN when n < 2
    bool defined = false;
};

MeanCi mean_ci(std::span<const double> values);

struct RunGroup {
    std::string algorithm;
    double alpha = 0.0;
    std::size_t T = 0;
    MeanCi est_error;
    MeanCi excess_risk;
};

/// Groups by (algorithm, alpha, T) in first-appearance order.
std::vector<RunGroup> aggregate_runs(std::span<const MetricPoint> points);

} // namespace robreg
