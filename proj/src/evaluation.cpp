#include "robreg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

constexpr double kZ95 = 1.96;

void check_n_mc(std::size_t n_mc, const char* what) {
    if (n_mc < 1000) {
        throw ContractError(std::string(what) + ": n_mc must be >= 1000");
    }
}

void check_dim(const Vector& w, const ProblemSpec& spec) {
    if (w.size() != spec.d) {
        throw ContractError("w has dimension " + std::to_string(w.size()) + ", spec has " + std::to_string(spec.d));
    }
}

// Clean (x, eps) pairs on their own sub-streams.
class CleanDraws {
public:
    CleanDraws(const ProblemSpec& spec, std::uint64_t seed)
        : spec_(spec),
          features_(spec.feature),
          feature_rng_(make_engine(seed, StreamRole::features)),
          noise_rng_(make_engine(seed, StreamRole::noise)) {}

    void next(Vector& x, double& eps) {
        features_.draw(feature_rng_, x);
        eps = draw_noise(spec_.noise, noise_rng_);
    }

private:
    const ProblemSpec& spec_;
    FeatureSampler features_;
    Engine feature_rng_;
    Engine noise_rng_;
};

} // namespace

double estimation_error(const Vector& w, const Vector& w_star) {
    if (w.size() != w_star.size()) {
        throw ContractError("estimation_error: dimension mismatch");
    }
    return (w - w_star).squaredNorm();
}

void MeanAccumulator::add(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
}

double MeanAccumulator::variance() const noexcept {
    return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

McEstimate MeanAccumulator::estimate() const {
    return {mean_, n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_))};
}

McEstimate excess_risk_mc(const Vector& w, const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed) {
    check_n_mc(n_mc, "excess_risk_mc");
    check_dim(w, spec);
    const Vector offset = w - spec.w_star;
    CleanDraws draws(spec, seed);
    MeanAccumulator acc;
    Vector x;
    double eps = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        draws.next(x, eps);
        const double r = offset.dot(x) - eps;
        acc.add(0.5 * r * r - 0.5 * eps * eps);
    }
    return acc.estimate();
}

McEstimate clean_loss_mc(const Vector& w, const ProblemSpec& spec, std::size_t n_mc, std::uint64_t seed) {
    check_n_mc(n_mc, "clean_loss_mc");
    check_dim(w, spec);
    CleanDraws draws(spec, seed);
    MeanAccumulator acc;
    Vector x;
    double eps = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        draws.next(x, eps);
        const double r = w.dot(x) - (spec.w_star.dot(x) + eps);
        acc.add(0.5 * r * r);
    }
    return acc.estimate();
}

McEstimate huber_population_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                    std::uint64_t seed) {
    check_n_mc(n_mc, "huber_population_loss_mc");
    check_dim(w, spec);
    SampleStream stream(spec, seed);
    MeanAccumulator acc;
    Observation obs;
    for (std::size_t i = 0; i < n_mc; ++i) {
        stream.next(obs);
        acc.add(huber_loss(w.dot(obs.x) - obs.y, R));
    }
    return acc.estimate();
}

McEstimate corrupted_huber_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                   std::uint64_t seed) {
    check_n_mc(n_mc, "corrupted_huber_loss_mc");
    check_dim(w, spec);
    if (!(spec.alpha() > 0.0)) {
        throw ContractError("corrupted_huber_loss_mc: alpha = 0 leaves H undefined");
    }
    CleanDraws draws(spec, seed);
    Engine corruption_rng = make_engine(seed, StreamRole::corruption);
    const double anchor = spec.clean_mean_response();
    const Vector offset = w - spec.w_star;
    MeanAccumulator acc;
    Vector x;
    double eps = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        draws.next(x, eps);
        const double b = draw_corruption_value(spec.corruption, corruption_rng, anchor);
        acc.add(huber_loss(offset.dot(x) - eps - b, R));
    }
    return acc.estimate();
}

McEstimate huber_excess_loss_mc(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                std::uint64_t seed) {
    check_n_mc(n_mc, "huber_excess_loss_mc");
    check_dim(w, spec);
    SampleStream stream(spec, seed);
    MeanAccumulator acc;
    Observation obs;
    for (std::size_t i = 0; i < n_mc; ++i) {
        stream.next(obs);
        acc.add(huber_loss(w.dot(obs.x) - obs.y, R) - huber_loss(spec.w_star.dot(obs.x) - obs.y, R));
    }
    return acc.estimate();
}

DecompositionCheck decomposition_check(const Vector& w, const ProblemSpec& spec, double R, std::size_t n_mc,
                                       std::uint64_t seed) {
    const double alpha = spec.alpha();
    DecompositionCheck out;
    out.L = huber_population_loss_mc(w, spec, R, n_mc, derive_seed({seed, 1}));
    out.F = clean_loss_mc(w, spec, n_mc, derive_seed({seed, 2}));
    double mixed = (1.0 - alpha) * out.F.estimate;
    double var = out.L.std_error * out.L.std_error + std::pow((1.0 - alpha) * out.F.std_error, 2);
    if (alpha > 0.0) {
        out.H = corrupted_huber_loss_mc(w, spec, R, n_mc, derive_seed({seed, 3}));
        mixed += alpha * out.H.estimate;
        var += std::pow(alpha * out.H.std_error, 2);
    }
    out.residual = out.L.estimate - mixed;
    out.combined_se = std::sqrt(var);
    return out;
}

bool has_guarantee(Algorithm a) {
    return a == Algorithm::huber_uniform || a == Algorithm::huber_known_mean || a == Algorithm::huber_unknown_mean;
}

double theoretical_bound(Algorithm a, double D, double R, double alpha, double rho, std::size_t T) {
    if (!has_guarantee(a)) {
        throw ContractError("no convergence guarantee for " + std::string(algorithm_name(a)));
    }
    if (!(D > 0.0) || !(R > 0.0) || !(alpha >= 0.0 && alpha < 1.0) || T < 1) {
        throw ContractError("theoretical_bound: need D, R > 0, alpha in [0, 1), T >= 1");
    }
    const double t = static_cast<double>(T);
    if (a == Algorithm::huber_uniform) {
        return R * D / ((1.0 - alpha) * std::sqrt(t));
    }
    if (!(rho > 0.0)) {
        throw ContractError("theoretical_bound: strongly convex bounds need rho > 0");
    }
    const double lambda = (1.0 - alpha) * rho;
    const double known = 72.0 * R * R / (lambda * lambda * t);
    return a == Algorithm::huber_known_mean ? known : known * (2.0 * std::log(t) + 1.0);
}

double theoretical_bound_subgaussian(double D, double R, double alpha, double rho, std::size_t T) {
    if (!(D > 0.0) || !(R > 0.0) || !(alpha >= 0.0 && alpha < 1.0) || !(rho > 0.0) || T < 1) {
        throw ContractError("theoretical_bound_subgaussian: invalid parameters");
    }
    const double t = static_cast<double>(T);
    const double lambda = (1.0 - alpha) * rho;
    return (D * D / 14.0 + 288.0 * R * R * (2.0 * std::log(t) + 1.0) / (lambda * lambda)) / t;
}

RateFit rate_fit(std::span<const std::pair<double, double>> t_and_error) {
    if (t_and_error.size() < 3) {
        throw ContractError("rate_fit: need at least 3 points");
    }
    std::set<double> seen;
    RateFit fit;
    for (const auto& [T, err] : t_and_error) {
        if (!(T > 0.0) || !std::isfinite(T)) throw ContractError("rate_fit: T must be positive");
        if (!(err > 0.0) || !std::isfinite(err)) throw ContractError("rate_fit: errors must be positive");
        if (!seen.insert(T).second) throw ContractError("rate_fit: duplicate T");
        fit.points.emplace_back(std::log(T), std::log(err));
    }
    const double n = static_cast<double>(fit.points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : fit.points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : fit.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : fit.points) {
        const double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
    }
    // A flat series is fitted exactly by slope 0.
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

MeanCi mean_ci(std::span<const double> values) {
    MeanCi ci;
    ci.n = values.size();
    if (values.empty()) {
        ci.mean = std::numeric_limits<double>::quiet_NaN();
        ci.half_width = ci.mean;
        return ci;
    }
    MeanAccumulator acc;
    for (double v : values) acc.add(v);
    ci.mean = acc.mean();
    if (ci.n < 2) {
        ci.half_width = std::numeric_limits<double>::quiet_NaN();
        return ci;
    }
    ci.defined = true;
    ci.half_width = kZ95 * std::sqrt(acc.variance()) / std::sqrt(static_cast<double>(ci.n));
    return ci;
}

std::vector<RunGroup> aggregate_runs(std::span<const MetricPoint> points) {
    struct Bucket {
        std::vector<double> est;
        std::vector<double> risk;
    };
    using Key = std::tuple<std::string, double, std::size_t>;
    std::vector<Key> order;
    std::map<Key, Bucket> buckets;
    for (const auto& p : points) {
        Key key{p.algorithm, p.alpha, p.T};
        auto [it, inserted] = buckets.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.est.push_back(p.est_error);
        it->second.risk.push_back(p.excess_risk);
    }
    std::vector<RunGroup> groups;
    groups.reserve(order.size());
    for (const auto& key : order) {
        const auto& b = buckets.at(key);
        groups.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), mean_ci(b.est), mean_ci(b.risk)});
    }
    return groups;
}

} // namespace robreg
