#include "robreg/demos.hpp"

#include <cmath>

#include "robreg/errors.hpp"
#include "robreg/evaluation.hpp"
#include "robreg/optimizers.hpp"
#include "robreg/scenarios.hpp"

namespace robreg {

BiasDemoReport demo_example_2_1(double C, double alpha, std::size_t T, std::size_t seeds, std::uint64_t base_seed,
                                 double w_star) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("demo_example_2_1 needs alpha in (0, 1)");
    if (seeds < 1) throw ContractError("demo_example_2_1 needs at least one seed");
    const ProblemSpec spec = scenarios::two_point_shift(C, alpha, w_star);
    const double lambda = (1.0 - alpha) * spec.rho;

    OptimizerConfig l2;
    l2.algorithm = Algorithm::l2_sgd;
    l2.T = T;
    l2.ball = BallConstraint(spec.D);
    l2.lambda = lambda;

    OptimizerConfig huber = l2;
    huber.algorithm = Algorithm::huber_unknown_mean;
    huber.huber = radius_bounded(spec.D, spec.sigma());

    BiasDemoReport report;
    report.C = C;
    report.alpha = alpha;
    report.w_star = w_star;
    report.T = T;
    report.seeds = seeds;
    report.predicted_biased_optimum = w_star + 0.5 * C;
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::uint64_t seed = derive_seed({base_seed, i});
        SampleStream a(spec, seed);
        report.l2_estimate_mean += l2_sgd(a, l2).estimate[0];
        SampleStream b(spec, seed);
        report.huber_estimate_mean += huber_sgd_unknown_mean(b, huber).estimate[0];
    }
    report.l2_estimate_mean /= static_cast<double>(seeds);
    report.huber_estimate_mean /= static_cast<double>(seeds);
    return report;
}

IndistinguishableReport demo_indistinguishable(std::size_t T, std::uint64_t seed, double alpha) {
    if (T < 1) throw ContractError("demo_indistinguishable: T must be >= 1");
    IndistinguishableReport report;
    report.T = T;
    report.alpha = alpha;
    const double w_stars[2] = {-1.0, 1.0};
    double freq[2] = {0.0, 0.0};
    for (int m = 0; m < 2; ++m) {
        SampleStream stream(scenarios::indistinguishable(w_stars[m], alpha), derive_seed({seed, std::uint64_t(m)}));
        Sample s;
        std::size_t plus = 0;
        for (std::size_t i = 0; i < T; ++i) {
            stream.next_sample(s);
            if (s.y > 0.0) ++plus;
        }
        freq[m] = static_cast<double>(plus) / static_cast<double>(T);
    }
    report.plus_frequency_first = freq[0];
    report.plus_frequency_second = freq[1];
    // Support {-1, +1}: TV = (|p1 - q1| + |p2 - q2|) / 2 = |p1 - q1|.
    report.tv_distance = std::abs(freq[0] - freq[1]);
    return report;
}

DecompositionReport demo_decomposition(const ProblemSpec& spec, std::size_t points, std::size_t n_mc,
                                       std::uint64_t seed, double tolerance) {
    spec.validate();
    const double R = radius_bounded(spec.D, spec.sigma()).radius;
    DecompositionReport report;
    report.points = points;
    report.tolerance = tolerance;
    for (std::size_t i = 0; i < points; ++i) {
        const Vector w = sample_uniform_ball(spec.d, spec.D, derive_seed({seed, i, 0x77}));
        const DecompositionCheck c = decomposition_check(w, spec, R, n_mc, derive_seed({seed, i}));
        const double ratio = c.combined_se > 0.0 ? std::abs(c.residual) / c.combined_se
                                                 : (c.residual == 0.0 ? 0.0 : INFINITY);
        report.worst_ratio = std::max(report.worst_ratio, ratio);
        if (c.within(tolerance) || c.residual == 0.0) ++report.within;
    }
    return report;
}

} // namespace robreg
