#include "robreg/optimizers.hpp"

#include <array>
#include <cmath>
#include <string>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kNames{{
    {Algorithm::huber_uniform, "huber_uniform"},
    {Algorithm::huber_known_mean, "huber_known_mean"},
    {Algorithm::huber_unknown_mean, "huber_unknown_mean"},
    {Algorithm::huber_streaming_mean, "huber_streaming_mean"},
    {Algorithm::huber_noncentered, "huber_noncentered"},
    {Algorithm::l2_sgd, "l2_sgd"},
}};

enum class Loss { huber, squared };
enum class Centering { none, fixed, streaming };
enum class Averaging { uniform, suffix };

struct Plan {
    Loss loss = Loss::huber;
    Centering centering = Centering::none;
    Averaging averaging = Averaging::suffix;
    // eta_t = step / t when decaying, otherwise eta_t = step.
    double step = 1.0;
    bool decaying = true;
};

void require_samples(ObservationSource& stream, Observation& obs, std::size_t consumed, std::size_t required) {
    if (!stream.next(obs)) {
        throw StreamExhausted(consumed, required);
    }
    if (obs.x.size() == 0) {
        throw ContractError("empty feature vector in stream");
    }
}

std::size_t suffix_start(std::size_t T) {
    // Averages w_t for t > T - ceil(T/2).
    return T - (T + 1) / 2;
}

// Shared projected-SGD loop. `center` is the fixed center (Centering::fixed) and
// is ignored otherwise. `offset` is the count of samples read before this call.
RunResult run_plan(ObservationSource& stream, const OptimizerConfig& cfg, const Plan& plan, const Vector& center,
                   std::size_t offset, const GradientObserver& observe) {
    const auto started = std::chrono::steady_clock::now();
    const std::size_t T = cfg.T;
    const double D = cfg.ball.radius();
    const double R = cfg.huber.radius;
    const std::size_t required = offset + T;

    Observation obs;
    require_samples(stream, obs, offset, required);
    const auto d = obs.x.size();
    if (plan.centering == Centering::fixed && center.size() != d) {
        throw ContractError("center dimension " + std::to_string(center.size()) + " does not match features " +
                            std::to_string(d));
    }

    Vector w = Vector::Zero(d);
    Vector mu = plan.centering == Centering::fixed ? center : Vector::Zero(d);
    Vector g(d);
    Vector sum = Vector::Zero(d);
    std::size_t averaged = 0;
    const std::size_t first_averaged = plan.averaging == Averaging::uniform ? 0 : suffix_start(T);

    RunResult result;
    if (cfg.trace_stride > 0) {
        result.trace.reserve(T / cfg.trace_stride);
    }

    for (std::size_t t = 1; t <= T; ++t) {
        if (t > first_averaged) {
            sum += w;
            ++averaged;
        }
        if (cfg.trace_stride > 0 && t % cfg.trace_stride == 0) {
            result.trace.push_back({t, w});
        }
        if (t > 1) {
            require_samples(stream, obs, offset + t - 1, required);
            if (obs.x.size() != d) {
                throw ContractError("feature dimension changed mid-stream");
            }
        }

        if (plan.loss == Loss::squared) {
            g = obs.x * (w.dot(obs.x) - obs.y);
        } else if (plan.centering == Centering::none) {
            g = obs.x * huber_clip(w.dot(obs.x) - obs.y, R);
        } else {
            huber_gradient_into(w, obs.x, obs.y, mu, R, g);
        }
        if (observe) {
            observe(t, g);
        }

        const double eta = plan.decaying ? plan.step / static_cast<double>(t) : plan.step;
        w.noalias() -= eta * g;
        project_ball_inplace(w, D);

        if (plan.centering == Centering::streaming) {
            // mu_{t+1} is the mean of x_1..x_t.
            mu += (obs.x - mu) / static_cast<double>(t);
        }
    }

    result.estimate = sum / static_cast<double>(averaged);
    result.samples_consumed = offset + T;
    if (plan.centering != Centering::none) {
        result.center = mu;
    }
    result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    return result;
}

double inverse_lambda(const OptimizerConfig& cfg) {
    if (!(cfg.lambda > 0.0)) {
        throw ContractError(std::string(algorithm_name(cfg.algorithm)) + " requires lambda > 0");
    }
    return 1.0 / cfg.lambda;
}

void check_config(const OptimizerConfig& cfg, Algorithm expected) {
    if (cfg.algorithm != expected) {
        throw ContractError("config names " + std::string(algorithm_name(cfg.algorithm)) + " but " +
                            std::string(algorithm_name(expected)) + " was called");
    }
    cfg.validate();
}

} // namespace

std::string_view algorithm_name(Algorithm a) {
    for (const auto& [alg, name] : kNames) {
        if (alg == a) return name;
    }
    return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (const auto& [alg, n] : kNames) {
        if (n == name) return alg;
    }
    return std::nullopt;
}

std::size_t samples_required(Algorithm a, std::size_t T) { return a == Algorithm::huber_unknown_mean ? 2 * T : T; }

void OptimizerConfig::validate() const {
    if (T < 1) {
        throw ContractError("T must be >= 1");
    }
    if (algorithm != Algorithm::l2_sgd && (!(huber.radius > 0.0) || !std::isfinite(huber.radius))) {
        throw ContractError("Huber radius must be positive");
    }
    switch (algorithm) {
    case Algorithm::huber_uniform:
        break;
    case Algorithm::huber_known_mean:
    case Algorithm::huber_unknown_mean:
        inverse_lambda(*this);
        break;
    default:
        if (eta0) {
            if (!(*eta0 > 0.0) || !std::isfinite(*eta0)) throw ContractError("eta0 must be positive");
        } else {
            inverse_lambda(*this);
        }
    }
}

double OptimizerConfig::step_base() const { return eta0 ? *eta0 : inverse_lambda(*this); }

Vector suffix_average(std::span<const Vector> iterates) {
    if (iterates.empty()) {
        throw ContractError("suffix_average of an empty list");
    }
    const std::size_t n = iterates.size();
    Vector sum = Vector::Zero(iterates.front().size());
    std::size_t count = 0;
    for (std::size_t i = suffix_start(n); i < n; ++i) {
        if (iterates[i].size() != sum.size()) throw ContractError("suffix_average: ragged iterates");
        sum += iterates[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

RunResult huber_sgd_uniform(ObservationSource& stream, const OptimizerConfig& cfg, const GradientObserver& observe) {
    check_config(cfg, Algorithm::huber_uniform);
    Plan plan;
    plan.averaging = Averaging::uniform;
    plan.decaying = false;
    plan.step = cfg.ball.radius() / (cfg.huber.radius * std::sqrt(static_cast<double>(cfg.T)));
    return run_plan(stream, cfg, plan, Vector{}, 0, observe);
}

RunResult huber_sgd_known_mean(ObservationSource& stream, const OptimizerConfig& cfg, const Vector& mean,
                               const GradientObserver& observe) {
    check_config(cfg, Algorithm::huber_known_mean);
    Plan plan;
    plan.centering = Centering::fixed;
    plan.step = inverse_lambda(cfg);
    return run_plan(stream, cfg, plan, mean, 0, observe);
}

RunResult huber_sgd_unknown_mean(ObservationSource& stream, const OptimizerConfig& cfg,
                                 const GradientObserver& observe) {
    check_config(cfg, Algorithm::huber_unknown_mean);
    const auto started = std::chrono::steady_clock::now();
    const std::size_t required = 2 * cfg.T;

    // Phase 1: mean of T held-out features; their responses are discarded.
    Observation obs;
    Vector mu;
    for (std::size_t i = 1; i <= cfg.T; ++i) {
        require_samples(stream, obs, i - 1, required);
        if (i == 1) {
            mu = Vector::Zero(obs.x.size());
        } else if (obs.x.size() != mu.size()) {
            throw ContractError("feature dimension changed mid-stream");
        }
        mu += (obs.x - mu) / static_cast<double>(i);
    }

    Plan plan;
    plan.centering = Centering::fixed;
    plan.step = inverse_lambda(cfg);
    RunResult r = run_plan(stream, cfg, plan, mu, cfg.T, observe);
    r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    return r;
}

RunResult huber_sgd_streaming_mean(ObservationSource& stream, const OptimizerConfig& cfg,
                                   const GradientObserver& observe) {
    check_config(cfg, Algorithm::huber_streaming_mean);
    Plan plan;
    plan.centering = Centering::streaming;
    plan.step = cfg.step_base();
    return run_plan(stream, cfg, plan, Vector{}, 0, observe);
}

RunResult huber_sgd_noncentered(ObservationSource& stream, const OptimizerConfig& cfg,
                                const GradientObserver& observe) {
    check_config(cfg, Algorithm::huber_noncentered);
    Plan plan;
    plan.centering = Centering::none;
    plan.step = cfg.step_base();
    return run_plan(stream, cfg, plan, Vector{}, 0, observe);
}

RunResult l2_sgd(ObservationSource& stream, const OptimizerConfig& cfg, const GradientObserver& observe) {
    check_config(cfg, Algorithm::l2_sgd);
    Plan plan;
    plan.loss = Loss::squared;
    plan.step = cfg.step_base();
    return run_plan(stream, cfg, plan, Vector{}, 0, observe);
}

RunResult run_optimizer(ObservationSource& stream, const OptimizerConfig& cfg, const std::optional<Vector>& mean,
                        const GradientObserver& observe) {
    switch (cfg.algorithm) {
    case Algorithm::huber_uniform:
        return huber_sgd_uniform(stream, cfg, observe);
    case Algorithm::huber_known_mean:
        if (!mean) throw ContractError("huber_known_mean needs the feature mean");
        return huber_sgd_known_mean(stream, cfg, *mean, observe);
    case Algorithm::huber_unknown_mean:
        return huber_sgd_unknown_mean(stream, cfg, observe);
    case Algorithm::huber_streaming_mean:
        return huber_sgd_streaming_mean(stream, cfg, observe);
    case Algorithm::huber_noncentered:
        return huber_sgd_noncentered(stream, cfg, observe);
    case Algorithm::l2_sgd:
        return l2_sgd(stream, cfg, observe);
    }
    throw ContractError("unknown algorithm");
}

} // namespace robreg
