#include "robreg/huber.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robreg/errors.hpp"

namespace robreg {

namespace {

void check_radius(double R) {
    if (!std::isfinite(R) || R <= 0.0) {
        throw DomainError("Huber radius must be finite and positive, got " + std::to_string(R));
    }
}

void check_finite(double s, const char* what) {
    if (!std::isfinite(s)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void check_same_dim(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        throw ContractError(std::string("dimension mismatch: ") + what + " (" +
                            std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

} // namespace

HuberParams HuberParams::explicit_radius(double radius) {
    check_radius(radius);
    return HuberParams{radius, ExplicitRadius{}};
}

BallConstraint::BallConstraint(double D) : D_(D) {
    if (!std::isfinite(D) || D <= 0.0) {
        throw ContractError("ball radius D must be finite and positive");
    }
}

double huber_loss(double s, double R) {
    check_radius(R);
    check_finite(s, "residual");
    const double a = std::abs(s);
    if (a <= R) {
        return 0.5 * s * s;
    }
    return R * (a - 0.5 * R);
}

double huber_clip(double s, double R) {
    check_radius(R);
    check_finite(s, "residual");
    return std::min(R, std::max(s, -R));
}

void huber_gradient_into(const Vector& w, const Vector& x, double y, const Vector& center,
                         double R, Vector& out) {
    check_same_dim(w, x, "w and x");
    check_same_dim(w, center, "w and center");
    out = x - center;
    const double residual = w.dot(out) - y;
    out *= huber_clip(residual, R);
}

Vector huber_gradient(const Vector& w, const Vector& x, double y, const Vector& center, double R) {
    Vector g;
    huber_gradient_into(w, x, y, center, R, g);
    return g;
}

void project_ball_inplace(Vector& u, double D) {
    if (!std::isfinite(D) || D <= 0.0) {
        throw ContractError("ball radius D must be finite and positive");
    }
    if (!u.allFinite()) {
        throw DomainError("cannot project a non-finite vector");
    }
    const double n = u.norm();
    if (n > D) {
        u *= D / n;
    }
}

Vector project_ball(const Vector& u, double D) {
    Vector out = u;
    project_ball_inplace(out, D);
    return out;
}

HuberParams radius_bounded(double D, double sigma) {
    if (!(D > 0.0) || !std::isfinite(D)) {
        throw ContractError("radius_bounded: D must be positive");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ContractError("radius_bounded: sigma must be nonnegative");
    }
    return HuberParams{6.0 * D + sigma, BoundedRule{D, sigma}};
}

HuberParams radius_subgaussian(double D, double sigma, double kappa, double rho, std::int64_t T) {
    for (double p : {D, sigma, kappa, rho}) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw ContractError("radius_subgaussian: D, sigma, kappa and rho must be positive");
        }
    }
    if (T < 2) {
        throw ContractError("radius_subgaussian: T must be at least 2");
    }
    const double t = static_cast<double>(T);
    const double sqrt_rho = std::sqrt(rho);
    const double feature_part =
        2.0 * std::sqrt(8.0 * kappa * kappa * std::log((21.0 * kappa / sqrt_rho + 8.0) * t)) * D;
    const double noise_part =
        std::sqrt(8.0 * sigma * sigma * std::log((21.0 * sigma / sqrt_rho + 8.0) * t));
    return HuberParams{feature_part + noise_part, SubGaussianRule{D, sigma, kappa, rho, T}};
}

} // namespace robreg
