#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "robreg/huber.hpp"
#include "robreg/rng.hpp"

namespace robreg {

using Matrix = Eigen::MatrixXd;

bool same_vector(const Vector& a, const Vector& b);

// ---------------------------------------------------------------------------
// Feature laws

/// Each coordinate Uniform[-1/sqrt(d), 0]; ||x|| <= 1 surely.
struct UnitBoxNegative {
    int d = 1;
    bool operator==(const UnitBoxNegative&) const = default;
};

/// Uniform over {+-e_1, ..., +-e_d}: zero mean, covariance I/d.
struct SignedBasis {
    int d = 1;
    bool operator==(const SignedBasis&) const = default;
};

/// Arbitrary finite support. Probabilities must sum to 1.
struct FixedSupport {
    std::vector<Vector> points;
    std::vector<double> probs;
    bool operator==(const FixedSupport& o) const;
};

struct GaussianFeatures {
    Vector mean;
    Matrix covariance;
    bool operator==(const GaussianFeatures& o) const;
};

using FeatureDistribution = std::variant<UnitBoxNegative, SignedBasis, FixedSupport, GaussianFeatures>;

int feature_dim(const FeatureDistribution& f);
Vector feature_mean(const FeatureDistribution& f);
std::string feature_name(const FeatureDistribution& f);
void validate_features(const FeatureDistribution& f);

class FeatureSampler {
public:
    explicit FeatureSampler(FeatureDistribution dist);
    void draw(Engine& rng, Vector& out) const;
    int dim() const noexcept { return dim_; }

private:
    FeatureDistribution dist_;
    int dim_;
    std::vector<double> cumulative_;  // fixed support
    Matrix chol_;                     // gaussian
};

// ---------------------------------------------------------------------------
// Noise laws (all zero mean)

struct ZeroNoise {
    bool operator==(const ZeroNoise&) const = default;
};
struct UniformNoise {
    double sigma = 0.0;  // half-width
    bool operator==(const UniformNoise&) const = default;
};
struct GaussianNoise {
    double sigma = 1.0;
    bool operator==(const GaussianNoise&) const = default;
};
/// Draws a magnitude from `values` with `probs`, then a fair sign.
struct DiscreteSymmetricNoise {
    std::vector<double> values;
    std::vector<double> probs;
    bool operator==(const DiscreteSymmetricNoise&) const = default;
};

using NoiseDistribution = std::variant<ZeroNoise, UniformNoise, GaussianNoise, DiscreteSymmetricNoise>;

/// The sure bound |eps| <= sigma for bounded laws, the variance proxy for Gaussian noise.
double noise_scale(const NoiseDistribution& n);
bool noise_bounded(const NoiseDistribution& n);
std::string noise_name(const NoiseDistribution& n);
void validate_noise(const NoiseDistribution& n);
double draw_noise(const NoiseDistribution& n, Engine& rng);

// ---------------------------------------------------------------------------
// Oblivious corruption

struct PointMass {
    double M = 0.0;
    bool operator==(const PointMass&) const = default;
};
/// b = C / alpha, so E[b] = C regardless of alpha.
struct ScaledPointMass {
    double C = 0.0;
    bool operator==(const ScaledPointMass&) const = default;
};
/// b = -scale * <w*, E[x]>. With x == 1 and scale 2 this is the "-2 w*" adversary
/// that makes two models indistinguishable. Depends only on population quantities.
struct SignFlipOfClean {
    double scale = 2.0;
    bool operator==(const SignFlipOfClean&) const = default;
};
struct GaussianCorruption {
    double s = 1.0;
    bool operator==(const GaussianCorruption&) const = default;
};

using CorruptionConditional = std::variant<PointMass, ScaledPointMass, SignFlipOfClean, GaussianCorruption>;

struct CorruptionModel {
    double alpha = 0.0;
    CorruptionConditional conditional = PointMass{0.0};
    bool operator==(const CorruptionModel&) const = default;
};

std::string corruption_name(const CorruptionConditional& c);
void validate_corruption(const CorruptionModel& m);

/// Draw b given b != 0. `clean_mean_response` is <w*, E[x]>, used by SignFlipOfClean only.
double draw_corruption_value(const CorruptionModel& m, Engine& rng, double clean_mean_response = 0.0);

/// Bernoulli(alpha) gate, then a conditional draw. Always consumes one gate draw.
double draw_corruption(const CorruptionModel& m, Engine& rng, double clean_mean_response = 0.0);

// ---------------------------------------------------------------------------

struct ProblemSpec {
    int d = 1;
    Vector w_star;
    double D = 1.0;
    FeatureDistribution feature = SignedBasis{1};
    NoiseDistribution noise = ZeroNoise{};
    CorruptionModel corruption;
    double rho = 0.0;
    std::optional<Vector> known_mean;

    /// Throws ContractError on any violated invariant.
    void validate() const;

    double sigma() const { return noise_scale(noise); }
    double alpha() const { return corruption.alpha; }
    Vector mean() const;
    double clean_mean_response() const;

    bool operator==(const ProblemSpec& o) const;
};

/// Uniform draw from the ball of radius D in R^d.
Vector sample_uniform_ball(int d, double D, std::uint64_t seed);

/// y = <w*, x> + eps + b. `corrupted` is for evaluation code only.
struct Sample {
    Vector x;
    double y = 0.0;
    bool corrupted = false;
};

/// What an optimizer sees: no corruption flag.
struct Observation {
    Vector x;
    double y = 0.0;
};

class ObservationSource {
public:
    virtual ~ObservationSource() = default;
    /// Fills `out` and returns true, or returns false when the source is exhausted.
    virtual bool next(Observation& out) = 0;
    virtual int dim() const = 0;
};

/// Draws i.i.d. samples from the contaminated model. Features, noise and the
/// corruption gate each run on their own engine derived from (seed, role), so
/// b is independent of (x, eps) and the stream is reproducible.
class SampleStream : public ObservationSource {
public:
    SampleStream(ProblemSpec spec, std::uint64_t seed,
                 std::optional<std::size_t> limit = std::nullopt);

    bool next_sample(Sample& out);
    bool next(Observation& out) override;
    int dim() const override { return spec_.d; }

    const ProblemSpec& spec() const noexcept { return spec_; }
    std::size_t produced() const noexcept { return produced_; }

private:
    ProblemSpec spec_;
    FeatureSampler features_;
    Engine feature_rng_;
    Engine noise_rng_;
    Engine corruption_rng_;
    double anchor_;
    std::optional<std::size_t> limit_;
    std::size_t produced_ = 0;
};

/// Replays a materialized sample list, hiding the corruption flag.
class ReplaySource : public ObservationSource {
public:
    explicit ReplaySource(std::span<const Sample> samples);
    bool next(Observation& out) override;
    int dim() const override { return dim_; }

private:
    std::span<const Sample> samples_;
    std::size_t pos_ = 0;
    int dim_ = 0;
};

std::vector<Sample> sample_stream(const ProblemSpec& spec, std::uint64_t seed, std::size_t n);

struct PopulationMoments {
    Vector mean;
    double min_eig = 0.0;
};

/// Monte-Carlo estimate of E[x] and lambda_min(Cov x) from n_mc clean feature draws.
PopulationMoments population_moments(const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed);

} // namespace robreg
