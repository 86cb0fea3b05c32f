#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

namespace robreg {

using Vector = Eigen::VectorXd;

// How a Huber radius was chosen.
struct BoundedRule {
    double D;
    double sigma;
    bool operator==(const BoundedRule&) const = default;
};

struct SubGaussianRule {
    double D;
    double sigma;
    double kappa;
    double rho;
    std::int64_t T;
    bool operator==(const SubGaussianRule&) const = default;
};

struct ExplicitRadius {
    bool operator==(const ExplicitRadius&) const = default;
};

using RadiusDerivation = std::variant<BoundedRule, SubGaussianRule, ExplicitRadius>;

struct HuberParams {
    double radius = 1.0;
    RadiusDerivation derivation = ExplicitRadius{};

    static HuberParams explicit_radius(double radius);
    bool operator==(const HuberParams&) const = default;
};

// Feasible set W = { w : ||w|| <= D }.
class BallConstraint {
public:
    explicit BallConstraint(double D);
    double radius() const noexcept { return D_; }
    bool contains(const Vector& w, double slack = 0.0) const { return w.norm() <= D_ + slack; }
    bool operator==(const BallConstraint&) const = default;

private:
    double D_;
};

/// Huber loss: s^2/2 inside [-R, R], R(|s| - R/2) outside.
double huber_loss(double s, double R);

/// Derivative of huber_loss: s clipped to [-R, R].
double huber_clip(double s, double R);

/// Gradient in w of huber_loss(<w, x - center> - y, R).
///
/// Writes clip(<w, x - center> - y) * (x - center). The residual at the kink
/// |s| = R takes the clip value, i.e. the derivative from the quadratic side.
Vector huber_gradient(const Vector& w, const Vector& x, double y, const Vector& center, double R);

/// Allocation-free variant used by the optimizers. `out` is resized as needed.
void huber_gradient_into(const Vector& w, const Vector& x, double y, const Vector& center,
                         double R, Vector& out);

/// Euclidean projection onto the ball of radius D centred at the origin.
Vector project_ball(const Vector& u, double D);
void project_ball_inplace(Vector& u, double D);

/// R = 6D + sigma. Keeps every clean residual inside the quadratic branch for
/// w in W, even after centering features by a mean of norm <= 1.
HuberParams radius_bounded(double D, double sigma);

/// Radius for sub-Gaussian features (proxy kappa) and noise (proxy sigma):
///   2 sqrt(8 kappa^2 log((21 kappa / sqrt(rho) + 8) T)) D
///     + sqrt(8 sigma^2 log((21 sigma / sqrt(rho) + 8) T))
HuberParams radius_subgaussian(double D, double sigma, double kappa, double rho, std::int64_t T);

} // namespace robreg
