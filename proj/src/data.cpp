#include "robreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robreg/detail/overloaded.hpp"
#include "robreg/errors.hpp"

namespace robreg {

using detail::overloaded;

bool same_vector(const Vector& a, const Vector& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

bool FixedSupport::operator==(const FixedSupport& o) const {
    return probs == o.probs &&
           std::equal(points.begin(), points.end(), o.points.begin(), o.points.end(), same_vector);
}

bool GaussianFeatures::operator==(const GaussianFeatures& o) const {
    return same_vector(mean, o.mean) && covariance.rows() == o.covariance.rows() &&
           covariance.cols() == o.covariance.cols() &&
           (covariance.array() == o.covariance.array()).all();
}

namespace {

void check_probabilities(const std::vector<double>& probs, const char* what) {
    if (probs.empty()) {
        throw ContractError(std::string(what) + ": empty support");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ContractError(std::string(what) + ": probabilities must be nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ContractError(std::string(what) + ": probabilities must sum to 1");
    }
}

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> c(probs.size());
    std::partial_sum(probs.begin(), probs.end(), c.begin());
    c.back() = 1.0;
    return c;
}

std::size_t pick(const std::vector<double>& cum, double u) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
}

double uniform01(Engine& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

} // namespace

int feature_dim(const FeatureDistribution& f) {
    return std::visit(overloaded{
                          [](const UnitBoxNegative& u) { return u.d; },
                          [](const SignedBasis& s) { return s.d; },
                          [](const FixedSupport& s) {
                              return s.points.empty() ? 0 : static_cast<int>(s.points.front().size());
                          },
                          [](const GaussianFeatures& g) { return static_cast<int>(g.mean.size()); },
                      },
                      f);
}

Vector feature_mean(const FeatureDistribution& f) {
    return std::visit(overloaded{
                          [](const UnitBoxNegative& u) -> Vector {
                              return Vector::Constant(u.d, -0.5 / std::sqrt(static_cast<double>(u.d)));
                          },
                          [](const SignedBasis& s) -> Vector { return Vector::Zero(s.d); },
                          [](const FixedSupport& s) -> Vector {
                              Vector m = Vector::Zero(s.points.front().size());
                              for (std::size_t i = 0; i < s.points.size(); ++i) {
                                  m += s.probs[i] * s.points[i];
                              }
                              return m;
                          },
                          [](const GaussianFeatures& g) -> Vector { return g.mean; },
                      },
                      f);
}

std::string feature_name(const FeatureDistribution& f) {
    return std::visit(overloaded{
                          [](const UnitBoxNegative&) { return std::string("unit_box_negative"); },
                          [](const SignedBasis&) { return std::string("signed_basis"); },
                          [](const FixedSupport&) { return std::string("fixed_support"); },
                          [](const GaussianFeatures&) { return std::string("gaussian"); },
                      },
                      f);
}

void validate_features(const FeatureDistribution& f) {
    std::visit(overloaded{
                   [](const UnitBoxNegative& u) {
                       if (u.d < 1) throw ContractError("unit_box_negative: d must be >= 1");
                   },
                   [](const SignedBasis& s) {
                       if (s.d < 1) throw ContractError("signed_basis: d must be >= 1");
                   },
                   [](const FixedSupport& s) {
                       if (s.points.size() != s.probs.size()) {
                           throw ContractError("fixed_support: points and probs differ in length");
                       }
                       check_probabilities(s.probs, "fixed_support");
                       const auto d = s.points.front().size();
                       if (d < 1) throw ContractError("fixed_support: points must be nonempty vectors");
                       for (const auto& p : s.points) {
                           if (p.size() != d) throw ContractError("fixed_support: ragged points");
                           if (!p.allFinite()) throw ContractError("fixed_support: non-finite point");
                       }
                   },
                   [](const GaussianFeatures& g) {
                       const auto d = g.mean.size();
                       if (d < 1) throw ContractError("gaussian features: empty mean");
                       if (g.covariance.rows() != d || g.covariance.cols() != d) {
                           throw ContractError("gaussian features: covariance shape mismatch");
                       }
                       if (!g.covariance.isApprox(g.covariance.transpose(), 1e-12)) {
                           throw ContractError("gaussian features: covariance not symmetric");
                       }
                       Eigen::LLT<Matrix> llt(g.covariance);
                       if (llt.info() != Eigen::Success) {
                           throw ContractError("gaussian features: covariance not positive definite");
                       }
                   },
               },
               f);
}

FeatureSampler::FeatureSampler(FeatureDistribution dist) : dist_(std::move(dist)), dim_(feature_dim(dist_)) {
    validate_features(dist_);
    if (const auto* s = std::get_if<FixedSupport>(&dist_)) {
        cumulative_ = cumulative(s->probs);
    } else if (const auto* g = std::get_if<GaussianFeatures>(&dist_)) {
        chol_ = Eigen::LLT<Matrix>(g->covariance).matrixL();
    }
}

void FeatureSampler::draw(Engine& rng, Vector& out) const {
    out.resize(dim_);
    std::visit(overloaded{
                   [&](const UnitBoxNegative& u) {
                       const double w = 1.0 / std::sqrt(static_cast<double>(u.d));
                       for (int i = 0; i < u.d; ++i) out[i] = -w * uniform01(rng);
                   },
                   [&](const SignedBasis& s) {
                       const auto k = std::uniform_int_distribution<int>(0, 2 * s.d - 1)(rng);
                       out.setZero();
                       out[k / 2] = (k % 2 == 0) ? 1.0 : -1.0;
                   },
                   [&](const FixedSupport& s) { out = s.points[pick(cumulative_, uniform01(rng))]; },
                   [&](const GaussianFeatures& g) {
                       std::normal_distribution<double> n01;
                       Vector z(dim_);
                       for (int i = 0; i < dim_; ++i) z[i] = n01(rng);
                       out = g.mean + chol_ * z;
                   },
               },
               dist_);
}

// ---------------------------------------------------------------------------

double noise_scale(const NoiseDistribution& n) {
    return std::visit(overloaded{
                          [](const ZeroNoise&) { return 0.0; },
                          [](const UniformNoise& u) { return u.sigma; },
                          [](const GaussianNoise& g) { return g.sigma; },
                          [](const DiscreteSymmetricNoise& d) {
                              double m = 0.0;
                              for (double v : d.values) m = std::max(m, std::abs(v));
                              return m;
                          },
                      },
                      n);
}

bool noise_bounded(const NoiseDistribution& n) { return !std::holds_alternative<GaussianNoise>(n); }

std::string noise_name(const NoiseDistribution& n) {
    return std::visit(overloaded{
                          [](const ZeroNoise&) { return std::string("zero"); },
                          [](const UniformNoise&) { return std::string("uniform_symmetric"); },
                          [](const GaussianNoise&) { return std::string("gaussian"); },
                          [](const DiscreteSymmetricNoise&) { return std::string("discrete_symmetric"); },
                      },
                      n);
}

void validate_noise(const NoiseDistribution& n) {
    std::visit(overloaded{
                   [](const ZeroNoise&) {},
                   [](const UniformNoise& u) {
                       if (!(u.sigma >= 0.0) || !std::isfinite(u.sigma)) {
                           throw ContractError("uniform noise: sigma must be nonnegative");
                       }
                   },
                   [](const GaussianNoise& g) {
                       if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) {
                           throw ContractError("gaussian noise: sigma must be positive");
                       }
                   },
                   [](const DiscreteSymmetricNoise& d) {
                       if (d.values.size() != d.probs.size()) {
                           throw ContractError("discrete noise: values and probs differ in length");
                       }
                       check_probabilities(d.probs, "discrete noise");
                       for (double v : d.values) {
                           if (!std::isfinite(v)) throw ContractError("discrete noise: non-finite value");
                       }
                   },
               },
               n);
}

double draw_noise(const NoiseDistribution& n, Engine& rng) {
    return std::visit(overloaded{
                          [](const ZeroNoise&) { return 0.0; },
                          [&](const UniformNoise& u) {
                              return std::uniform_real_distribution<double>(-u.sigma, u.sigma)(rng);
                          },
                          [&](const GaussianNoise& g) { return std::normal_distribution<double>(0.0, g.sigma)(rng); },
                          [&](const DiscreteSymmetricNoise& d) {
                              const double u = uniform01(rng);
                              double acc = 0.0;
                              std::size_t k = d.values.size() - 1;
                              for (std::size_t i = 0; i < d.probs.size(); ++i) {
                                  acc += d.probs[i];
                                  if (u < acc) {
                                      k = i;
                                      break;
                                  }
                              }
                              const bool negative = uniform01(rng) < 0.5;
                              return negative ? -d.values[k] : d.values[k];
                          },
                      },
                      n);
}

// ---------------------------------------------------------------------------

std::string corruption_name(const CorruptionConditional& c) {
    return std::visit(overloaded{
                          [](const PointMass&) { return std::string("point_mass"); },
                          [](const ScaledPointMass&) { return std::string("scaled_point_mass"); },
                          [](const SignFlipOfClean&) { return std::string("sign_flip_of_clean"); },
                          [](const GaussianCorruption&) { return std::string("gaussian"); },
                      },
                      c);
}

void validate_corruption(const CorruptionModel& m) {
    if (!(m.alpha >= 0.0 && m.alpha < 1.0)) {
        throw ContractError("corruption alpha must lie in [0, 1)");
    }
    std::visit(overloaded{
                   [](const PointMass& p) {
                       if (!std::isfinite(p.M)) throw ContractError("point_mass: M must be finite");
                   },
                   [](const ScaledPointMass& p) {
                       if (!std::isfinite(p.C)) throw ContractError("scaled_point_mass: C must be finite");
                   },
                   [](const SignFlipOfClean& p) {
                       if (!std::isfinite(p.scale)) throw ContractError("sign_flip_of_clean: bad scale");
                   },
                   [](const GaussianCorruption& g) {
                       if (!(g.s > 0.0) || !std::isfinite(g.s)) {
                           throw ContractError("gaussian corruption: s must be positive");
                       }
                   },
               },
               m.conditional);
}

double draw_corruption_value(const CorruptionModel& m, Engine& rng, double clean_mean_response) {
    return std::visit(overloaded{
                          [](const PointMass& p) { return p.M; },
                          [&](const ScaledPointMass& p) { return p.C / m.alpha; },
                          [&](const SignFlipOfClean& p) { return -p.scale * clean_mean_response; },
                          [&](const GaussianCorruption& g) { return std::normal_distribution<double>(0.0, g.s)(rng); },
                      },
                      m.conditional);
}

double draw_corruption(const CorruptionModel& m, Engine& rng, double clean_mean_response) {
    const double u = uniform01(rng);
    if (!(u < m.alpha)) {
        return 0.0;
    }
    return draw_corruption_value(m, rng, clean_mean_response);
}

// ---------------------------------------------------------------------------

void ProblemSpec::validate() const {
    if (d < 1) throw ContractError("spec: d must be >= 1");
    if (!(D > 0.0) || !std::isfinite(D)) throw ContractError("spec: D must be positive");
    if (w_star.size() != d) throw ContractError("spec: w_star has wrong dimension");
    if (!w_star.allFinite()) throw ContractError("spec: w_star must be finite");
    if (w_star.norm() > D * (1.0 + 1e-12)) throw ContractError("spec: ||w_star|| exceeds D");
    validate_features(feature);
    if (feature_dim(feature) != d) throw ContractError("spec: feature dimension differs from d");
    validate_noise(noise);
    validate_corruption(corruption);
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ContractError("spec: rho must be nonnegative");
    if (known_mean && known_mean->size() != d) throw ContractError("spec: known_mean has wrong dimension");
}

Vector ProblemSpec::mean() const { return known_mean ? *known_mean : feature_mean(feature); }

double ProblemSpec::clean_mean_response() const { return w_star.dot(feature_mean(feature)); }

bool ProblemSpec::operator==(const ProblemSpec& o) const {
    const bool means_equal = known_mean.has_value() == o.known_mean.has_value() &&
                             (!known_mean || same_vector(*known_mean, *o.known_mean));
    return d == o.d && same_vector(w_star, o.w_star) && D == o.D && feature == o.feature &&
           noise == o.noise && corruption == o.corruption && rho == o.rho && means_equal;
}

Vector sample_uniform_ball(int d, double D, std::uint64_t seed) {
    if (d < 1 || !(D > 0.0)) throw ContractError("sample_uniform_ball: need d >= 1 and D > 0");
    Engine rng(derive_seed({seed, 0x77737461ULL}));
    std::normal_distribution<double> n01;
    Vector v(d);
    do {
        for (int i = 0; i < d; ++i) v[i] = n01(rng);
    } while (v.norm() == 0.0);
    const double r = D * std::pow(uniform01(rng), 1.0 / d);
    return v * (r / v.norm());
}

// ---------------------------------------------------------------------------

SampleStream::SampleStream(ProblemSpec spec, std::uint64_t seed, std::optional<std::size_t> limit)
    : spec_(std::move(spec)),
      features_(spec_.feature),
      feature_rng_(make_engine(seed, StreamRole::features)),
      noise_rng_(make_engine(seed, StreamRole::noise)),
      corruption_rng_(make_engine(seed, StreamRole::corruption)),
      anchor_(0.0),
      limit_(limit) {
    spec_.validate();
    anchor_ = spec_.clean_mean_response();
}

bool SampleStream::next_sample(Sample& out) {
    if (limit_ && produced_ >= *limit_) {
        return false;
    }
    features_.draw(feature_rng_, out.x);
    const double eps = draw_noise(spec_.noise, noise_rng_);
    const double b = draw_corruption(spec_.corruption, corruption_rng_, anchor_);
    out.y = spec_.w_star.dot(out.x) + eps + b;
    out.corrupted = (b != 0.0);
    ++produced_;
    return true;
}

bool SampleStream::next(Observation& out) {
    if (limit_ && produced_ >= *limit_) {
        return false;
    }
    features_.draw(feature_rng_, out.x);
    const double eps = draw_noise(spec_.noise, noise_rng_);
    const double b = draw_corruption(spec_.corruption, corruption_rng_, anchor_);
    out.y = spec_.w_star.dot(out.x) + eps + b;
    ++produced_;
    return true;
}

ReplaySource::ReplaySource(std::span<const Sample> samples)
    : samples_(samples), dim_(samples.empty() ? 0 : static_cast<int>(samples.front().x.size())) {}

bool ReplaySource::next(Observation& out) {
    if (pos_ >= samples_.size()) {
        return false;
    }
    out.x = samples_[pos_].x;
    out.y = samples_[pos_].y;
    ++pos_;
    return true;
}

std::vector<Sample> sample_stream(const ProblemSpec& spec, std::uint64_t seed, std::size_t n) {
    if (n < 1) throw ContractError("sample_stream: n must be >= 1");
    SampleStream stream(spec, seed, n);
    std::vector<Sample> out(n);
    for (auto& s : out) stream.next_sample(s);
    return out;
}

PopulationMoments population_moments(const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed) {
    if (n_mc < 1000) throw ContractError("population_moments: n_mc must be >= 1000");
    FeatureSampler sampler(spec.feature);
    Engine rng = make_engine(seed, StreamRole::features);
    const int d = sampler.dim();

    // Shifted accumulation keeps the covariance well conditioned when |E[x]| is large.
    Vector x(d);
    sampler.draw(rng, x);
    const Vector shift = x;
    Vector sum = Vector::Zero(d);
    Matrix sum_outer = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < n_mc; ++i) {
        if (i > 0) sampler.draw(rng, x);
        const Vector c = x - shift;
        sum += c;
        sum_outer.selfadjointView<Eigen::Lower>().rankUpdate(c);
    }
    const double n = static_cast<double>(n_mc);
    const Vector m = sum / n;
    Matrix cov = sum_outer.selfadjointView<Eigen::Lower>();
    cov = cov / n - m * m.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    return PopulationMoments{m + shift, eig.eigenvalues().minCoeff()};
}

} // namespace robreg
