#pragma once

#include <cstddef>
#include <cstdint>

#include "robreg/data.hpp"

namespace robreg {

struct BiasDemoReport {
    double C = 0.0;
    double alpha = 0.0;
    double w_star = 0.0;
    std::size_t T = 0;
    std::size_t seeds = 0;
    double l2_estimate_mean = 0.0;
    double huber_estimate_mean = 0.0;
    double predicted_biased_optimum = 0.0;  // w* + C/2

    double l2_to_biased() const { return std::abs(l2_estimate_mean - predicted_biased_optimum); }
    double l2_to_truth() const { return std::abs(l2_estimate_mean - w_star); }
    double huber_to_truth() const { return std::abs(huber_estimate_mean - w_star); }
    double huber_to_biased() const { return std::abs(huber_estimate_mean - predicted_biased_optimum); }
    bool passed(double l2_tol = 0.5, double huber_tol = 0.1) const {
        return l2_to_biased() <= l2_tol && huber_to_truth() <= huber_tol;
    }
};

/// Squared-loss SGD against the two-phase centered Huber SGD on the one-dimensional
/// example with x uniform on {0, 2} and b = C/alpha. Both methods read the same
/// stream for each seed.
BiasDemoReport demo_example_2_1(double C, double alpha, std::size_t T, std::size_t seeds,
                                 std::uint64_t base_seed = 2101, double w_star = 1.0);

struct IndistinguishableReport {
    std::size_t T = 0;
    double alpha = 0.0;
    double plus_frequency_first = 0.0;   // empirical P(y = +1), w* = -1
    double plus_frequency_second = 0.0;  // empirical P(y = +1), w* = +1
    double tv_distance = 0.0;
};

/// Total variation between the empirical response laws of the w* = -1 and w* = +1
/// models with x == 1 and the "-2 w*" adversary.
IndistinguishableReport demo_indistinguishable(std::size_t T, std::uint64_t seed, double alpha = 0.5);

struct DecompositionReport {
    std::size_t points = 0;
    std::size_t within = 0;
    double worst_ratio = 0.0;  // max |residual| / combined_se
    double tolerance = 4.0;
    bool passed() const { return within == points; }
};

/// Checks L_R = (1 - alpha) F + alpha H at `points` uniform draws from W with R = 6D + sigma.
DecompositionReport demo_decomposition(const ProblemSpec& spec, std::size_t points, std::size_t n_mc,
                                       std::uint64_t seed, double tolerance = 4.0);

} // namespace robreg
