#pragma once

#include <cstdint>

#include "robreg/data.hpp"

namespace robreg::scenarios {

inline constexpr std::uint64_t kDefaultWStarSeed = 20230607;

/// d = 1, x uniform on {0, 2}, no noise, b = C / alpha with probability alpha.
/// Squared loss is minimized at w* + C/2. Var(x) = 1.
ProblemSpec two_point_shift(double C, double alpha, double w_star = 1.0, double D = 10.0);

/// d = 1, x == 1, no noise, b = -2 w* with probability alpha. With alpha = 1/2 the
/// responses for w* and -w* have the same law.
ProblemSpec indistinguishable(double w_star, double alpha = 0.5);

/// x ~ Uniform[-1/sqrt(d), 0]^d, eps ~ Uniform[-0.1, 0.1], b = `b` with probability alpha,
/// w* uniform in the unit ball. rho = 1/(12 d).
ProblemSpec uniform_box_experiment(double alpha, double b = 1e5, int d = 5,
                                   std::uint64_t w_star_seed = kDefaultWStarSeed);

/// Zero-mean signed-basis features (rho = 1/d) with point-mass corruption M.
ProblemSpec signed_basis(int d, double alpha, double M, double sigma = 0.1,
                         std::uint64_t w_star_seed = kDefaultWStarSeed);

/// Zero-mean features uniform over {+-e_1, ..., +-e_rank} inside R^d, so the
/// covariance has d - rank zero eigenvalues (rho = 0).
ProblemSpec rank_deficient(int d, int rank, double alpha, double M, double sigma = 0.1,
                           std::uint64_t w_star_seed = kDefaultWStarSeed);

} // namespace robreg::scenarios
