#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "robreg/demos.hpp"
#include "robreg/errors.hpp"
#include "robreg/evaluation.hpp"
#include "robreg/scenarios.hpp"

using namespace robreg;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

// x == 1, eps == 0, no corruption.
ProblemSpec unit_feature_spec(double w_star) {
    ProblemSpec s = scenarios::indistinguishable(w_star, 0.0);
    s.D = 10.0;
    return s;
}

} // namespace

TEST(EstimationError, Examples) {
    EXPECT_EQ(estimation_error(v2(0.3, 0.4), v2(0.3, 0.4)), 0.0);
    EXPECT_EQ(estimation_error(v2(1, 0), v2(0, 0)), 1.0);
    EXPECT_EQ(estimation_error(Vector::Constant(1, 3.0), Vector::Constant(1, -1.0)), 16.0);
    EXPECT_THROW(estimation_error(v2(1, 0), Vector::Zero(3)), ContractError);
}

TEST(ExcessRisk, ExactlyZeroAtWStar) {
    const ProblemSpec spec = scenarios::uniform_box_experiment(0.4);
    for (std::size_t n : {1000, 12345}) {
        const auto e = excess_risk_mc(spec.w_star, spec, n, 9);
        EXPECT_EQ(e.estimate, 0.0);
        EXPECT_EQ(e.std_error, 0.0);
    }
}

TEST(ExcessRisk, DeterministicModel) {
    const ProblemSpec spec = unit_feature_spec(1.0);
    const double delta = 0.75;
    const auto e = excess_risk_mc(Vector::Constant(1, 1.0 + delta), spec, 1000, 1);
    EXPECT_EQ(e.estimate, delta * delta / 2);
}

TEST(ExcessRisk, SignedBasisClosedForm) {
    ProblemSpec spec = scenarios::signed_basis(4, 0.2, 1e5);
    spec.noise = ZeroNoise{};
    const Vector v = (Vector(4) << 0.3, -0.2, 0.1, 0.4).finished();
    const auto e = excess_risk_mc(spec.w_star + v, spec, 100000, 3);
    EXPECT_NEAR(e.estimate, v.squaredNorm() / (2 * 4), 3 * e.std_error);
}

TEST(ExcessRisk, NeedsEnoughDraws) {
    const ProblemSpec spec = unit_feature_spec(1.0);
    EXPECT_THROW(excess_risk_mc(spec.w_star, spec, 999, 1), ContractError);
}

TEST(HuberPopulationLoss, ZeroAtWStarWithoutNoise) {
    ProblemSpec spec = scenarios::signed_basis(3, 0.0, 0.0);
    spec.noise = ZeroNoise{};
    const auto e = huber_population_loss_mc(spec.w_star, spec, 6.0, 5000, 2);
    EXPECT_EQ(e.estimate, 0.0);
}

// Residual w - y is deterministic and far past R for every draw.
TEST(HuberPopulationLoss, LinearBranch) {
    ProblemSpec spec = scenarios::indistinguishable(1.0, 0.3);
    spec.D = 10.0;
    spec.corruption.conditional = PointMass{-50.0};
    const double R = 2.0;
    const Vector w = Vector::Constant(1, 9.0);
    const auto e = huber_population_loss_mc(w, spec, R, 100000, 8);
    // Clean residual 8, corrupted residual 58; both on the linear branch.
    const double expected_abs = 0.7 * 8.0 + 0.3 * 58.0;
    EXPECT_NEAR(e.estimate, R * (expected_abs - R / 2), 3 * e.std_error + 1e-9);
}

TEST(Decomposition, HoldsAtRandomPoints) {
    ProblemSpec spec = scenarios::uniform_box_experiment(0.3);
    spec.corruption.conditional = GaussianCorruption{10.0};
    const auto rep = demo_decomposition(spec, 20, 100000, 515);
    EXPECT_EQ(rep.within, rep.points);
    EXPECT_LE(rep.worst_ratio, 4.0);
}

TEST(Decomposition, CorruptedPartNeedsContamination) {
    const ProblemSpec spec = scenarios::signed_basis(2, 0.0, 1.0);
    EXPECT_THROW(corrupted_huber_loss_mc(spec.w_star, spec, 6.1, 1000, 1), ContractError);
}

// F(w) - F(w*) <= (L_R(w) - L_R(w*)) / (1 - alpha) on zero-mean features.
TEST(SurrogateDomination, ZeroMeanSpec) {
    const ProblemSpec spec = scenarios::signed_basis(4, 0.3, 1e5);
    const double R = radius_bounded(spec.D, spec.sigma()).radius;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const Vector w = sample_uniform_ball(spec.d, spec.D, derive_seed({31, i}));
        const auto f = excess_risk_mc(w, spec, 100000, derive_seed({32, i}));
        const auto l = huber_excess_loss_mc(w, spec, R, 100000, derive_seed({33, i}));
        const double rhs = l.estimate / (1 - spec.alpha());
        const double se = std::hypot(f.std_error, l.std_error / (1 - spec.alpha()));
        EXPECT_LE(f.estimate, rhs + 4 * se) << "i=" << i;
    }
}

TEST(TheoreticalBound, Examples) {
    EXPECT_NEAR(theoretical_bound(Algorithm::huber_uniform, 1.0, 6.1, 0.0, 0.0, 10000), 0.061, 1e-15);
    EXPECT_NEAR(theoretical_bound(Algorithm::huber_known_mean, 1.0, 6.1, 0.0, 0.2, 10000), 6.6978, 1e-12);
    EXPECT_EQ(theoretical_bound(Algorithm::huber_unknown_mean, 1.0, 6.1, 0.3, 0.2, 1),
              theoretical_bound(Algorithm::huber_known_mean, 1.0, 6.1, 0.3, 0.2, 1));
    const double T = 4096;
    EXPECT_NEAR(theoretical_bound(Algorithm::huber_unknown_mean, 1.0, 6.1, 0.3, 0.2, 4096),
                72 * 6.1 * 6.1 * (2 * std::log(T) + 1) / (0.14 * 0.14 * T), 1e-9);
    EXPECT_NEAR(theoretical_bound_subgaussian(2.0, 6.1, 0.3, 0.2, 4096),
                (4.0 / 14 + 288 * 6.1 * 6.1 * (2 * std::log(T) + 1) / (0.14 * 0.14)) / T, 1e-9);
}

TEST(TheoreticalBound, NoGuaranteeForBaselines) {
    for (Algorithm a : {Algorithm::l2_sgd, Algorithm::huber_noncentered, Algorithm::huber_streaming_mean}) {
        EXPECT_FALSE(has_guarantee(a));
        EXPECT_THROW(theoretical_bound(a, 1.0, 6.1, 0.0, 0.2, 100), ContractError);
    }
    EXPECT_THROW(theoretical_bound(Algorithm::huber_known_mean, 1.0, 6.1, 0.0, 0.0, 100), ContractError);
}

TEST(RateFit, PlantedSlopes) {
    std::vector<std::pair<double, double>> inv, inv_sqrt, flat;
    for (double T = 1024; T <= 65536; T *= 2) {
        inv.push_back({T, 3.7 / T});
        inv_sqrt.push_back({T, 0.2 / std::sqrt(T)});
        flat.push_back({T, 0.42});
    }
    const auto a = rate_fit(inv);
    EXPECT_NEAR(a.slope, -1.0, 1e-9);
    EXPECT_NEAR(a.r_squared, 1.0, 1e-9);
    EXPECT_NEAR(std::exp(a.intercept), 3.7, 1e-9);
    EXPECT_NEAR(rate_fit(inv_sqrt).slope, -0.5, 1e-9);
    const auto c = rate_fit(flat);
    EXPECT_NEAR(c.slope, 0.0, 1e-12);
    EXPECT_EQ(c.points.size(), 7u);
}

TEST(RateFit, RSquaredInUnitInterval) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::vector<std::pair<double, double>> pts;
    for (double T = 10; T < 1e6; T *= 3) pts.push_back({T, u(rng)});
    const auto f = rate_fit(pts);
    EXPECT_GE(f.r_squared, 0.0);
    EXPECT_LE(f.r_squared, 1.0);
}

TEST(RateFit, Preconditions) {
    using P = std::vector<std::pair<double, double>>;
    EXPECT_THROW(rate_fit(P{{10, 1}, {20, 1}}), ContractError);
    EXPECT_THROW(rate_fit(P{{10, 1}, {20, 0}, {40, 1}}), ContractError);
    EXPECT_THROW(rate_fit(P{{10, 1}, {20, -1}, {40, 1}}), ContractError);
    EXPECT_THROW(rate_fit(P{{10, 1}, {10, 2}, {10, 3}}), ContractError);
}

TEST(MeanCi, IdenticalValues) {
    const std::vector<double> v(15, 2.5);
    const auto ci = mean_ci(v);
    EXPECT_EQ(ci.mean, 2.5);
    EXPECT_EQ(ci.half_width, 0.0);
    EXPECT_TRUE(ci.defined);
}

TEST(MeanCi, TwoValues) {
    const std::vector<double> v{1.0, 3.0};
    const auto ci = mean_ci(v);
    EXPECT_EQ(ci.mean, 2.0);
    EXPECT_NEAR(ci.half_width, 1.96, 1e-15);
}

TEST(MeanCi, SingletonIsFlagged) {
    const std::vector<double> v{4.0};
    const auto ci = mean_ci(v);
    EXPECT_FALSE(ci.defined);
    EXPECT_TRUE(std::isnan(ci.half_width));
    EXPECT_EQ(ci.mean, 4.0);
}

TEST(MeanCi, CoverageNearNominal) {
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> n(3.0, 2.0);
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<double> v(15);
        for (auto& x : v) x = n(rng);
        const auto ci = mean_ci(v);
        covered += std::abs(ci.mean - 3.0) <= ci.half_width;
    }
    // Normal quantile with 15 draws slightly under-covers (t_14 would give 2.145).
    EXPECT_GE(covered, 910);
    EXPECT_LE(covered, 975);
}

TEST(AggregateRuns, GroupsInFirstAppearanceOrder) {
    std::vector<MetricPoint> pts;
    pts.push_back({"b", 0.1, 100, 1, 1.0, 0.5, 0.0, 0.0});
    pts.push_back({"a", 0.1, 100, 2, 2.0, 0.5, 0.0, 0.0});
    pts.push_back({"b", 0.1, 100, 3, 3.0, 1.5, 0.0, 0.0});
    pts.push_back({"b", 0.1, 200, 4, 3.0, 1.5, 0.0, 0.0});
    const auto g = aggregate_runs(pts);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].algorithm, "b");
    EXPECT_EQ(g[0].T, 100u);
    EXPECT_EQ(g[0].est_error.n, 2u);
    EXPECT_EQ(g[0].est_error.mean, 2.0);
    EXPECT_NEAR(g[0].est_error.half_width, 1.96, 1e-15);
    EXPECT_EQ(g[1].algorithm, "a");
    EXPECT_FALSE(g[1].est_error.defined);
    EXPECT_EQ(g[2].T, 200u);
}

TEST(BiasDemo, SeparatesSquaredAndHuber) {
    const auto rep = demo_example_2_1(10.0, 0.5, 100000, 5);
    EXPECT_EQ(rep.predicted_biased_optimum, rep.w_star + 5.0);
    EXPECT_LE(rep.l2_to_biased(), 0.5);
    EXPECT_LE(rep.huber_to_truth(), 0.1);
}

TEST(BiasDemo, NoCorruptionEffectAtZeroC) {
    const auto rep = demo_example_2_1(0.0, 0.5, 20000, 5);
    EXPECT_NEAR(rep.l2_estimate_mean, rep.w_star, 0.05);
    EXPECT_NEAR(rep.huber_estimate_mean, rep.w_star, 0.05);
}

TEST(BiasDemo, BiasTargetIndependentOfAlpha) {
    for (double alpha : {0.2, 0.5, 0.8}) {
        const auto rep = demo_example_2_1(4.0, alpha, 50000, 5);
        EXPECT_EQ(rep.predicted_biased_optimum, rep.w_star + 2.0);
        EXPECT_LE(rep.l2_to_biased(), 0.5) << "alpha=" << alpha;
    }
}

TEST(IndistinguishableDemo, TvSmallAtLargeT) {
    EXPECT_LE(demo_indistinguishable(100000, 1).tv_distance, 0.02);
}

TEST(IndistinguishableDemo, SmallTReportsAnything) {
    const auto rep = demo_indistinguishable(10, 1);
    EXPECT_GE(rep.tv_distance, 0.0);
    EXPECT_LE(rep.tv_distance, 1.0);
}

TEST(IndistinguishableDemo, WithoutCorruptionModelsSeparate) {
    EXPECT_EQ(demo_indistinguishable(1000, 1, 0.0).tv_distance, 1.0);
}
