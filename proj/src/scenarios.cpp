#include "robreg/scenarios.hpp"

#include <cmath>

#include "robreg/errors.hpp"

namespace robreg::scenarios {

ProblemSpec two_point_shift(double C, double alpha, double w_star, double D) {
    ProblemSpec spec;
    spec.d = 1;
    spec.w_star = Vector::Constant(1, w_star);
    spec.D = D;
    spec.feature = FixedSupport{{Vector::Constant(1, 0.0), Vector::Constant(1, 2.0)}, {0.5, 0.5}};
    spec.noise = ZeroNoise{};
    spec.corruption = CorruptionModel{alpha, ScaledPointMass{C}};
    spec.rho = 1.0;
    spec.validate();
    return spec;
}

ProblemSpec indistinguishable(double w_star, double alpha) {
    ProblemSpec spec;
    spec.d = 1;
    spec.w_star = Vector::Constant(1, w_star);
    spec.D = std::max(1.0, std::abs(w_star));
    spec.feature = FixedSupport{{Vector::Constant(1, 1.0)}, {1.0}};
    spec.noise = ZeroNoise{};
    spec.corruption = CorruptionModel{alpha, SignFlipOfClean{2.0}};
    spec.rho = 0.0;
    spec.validate();
    return spec;
}

ProblemSpec uniform_box_experiment(double alpha, double b, int d, std::uint64_t w_star_seed) {
    ProblemSpec spec;
    spec.d = d;
    spec.D = 1.0;
    spec.w_star = sample_uniform_ball(d, spec.D, w_star_seed);
    spec.feature = UnitBoxNegative{d};
    spec.noise = UniformNoise{0.1};
    spec.corruption = CorruptionModel{alpha, PointMass{b}};
    spec.rho = 1.0 / (12.0 * d);
    spec.validate();
    return spec;
}

ProblemSpec signed_basis(int d, double alpha, double M, double sigma, std::uint64_t w_star_seed) {
    ProblemSpec spec;
    spec.d = d;
    spec.D = 1.0;
    spec.w_star = sample_uniform_ball(d, spec.D, w_star_seed);
    spec.feature = SignedBasis{d};
    spec.noise = UniformNoise{sigma};
    spec.corruption = CorruptionModel{alpha, PointMass{M}};
    spec.rho = 1.0 / d;
    spec.known_mean = Vector::Zero(d);
    spec.validate();
    return spec;
}

ProblemSpec rank_deficient(int d, int rank, double alpha, double M, double sigma, std::uint64_t w_star_seed) {
    if (rank < 1 || rank > d) {
        throw ContractError("rank_deficient: need 1 <= rank <= d");
    }
    FixedSupport support;
    for (int i = 0; i < rank; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vector p = Vector::Zero(d);
            p[i] = sign;
            support.points.push_back(p);
            support.probs.push_back(1.0 / (2.0 * rank));
        }
    }
    ProblemSpec spec;
    spec.d = d;
    spec.D = 1.0;
    spec.w_star = sample_uniform_ball(d, spec.D, w_star_seed);
    spec.feature = std::move(support);
    spec.noise = UniformNoise{sigma};
    spec.corruption = CorruptionModel{alpha, PointMass{M}};
    spec.rho = 0.0;
    spec.known_mean = Vector::Zero(d);
    spec.validate();
    return spec;
}

} // namespace robreg::scenarios
