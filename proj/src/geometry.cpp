#include "dualgeo/geometry.hpp"

namespace dualgeo {

namespace {

Vector spd_solve(const Matrix& a, const Vector& b, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(what) + ": metric is not positive definite");
  return llt.solve(b);
}

void check_step_args(std::size_t dim, const Vector& x, const Vector& grad, double t, const char* what) {
  require_dim(dim, x.size(), what);
  require_dim(dim, grad.size(), what);
  require_finite(grad, what);
  if (!std::isfinite(t) || t < 0.0) throw NumericalError(std::string(what) + ": step size must be finite and >= 0");
}

}  // namespace

Vector grad_eta_from_grad_theta(const DuallyFlatModel& model, const Point& p, const Vector& grad_theta) {
  return spd_solve(model.metric_theta(p.theta()), grad_theta, "grad_eta_from_grad_theta");
}

Vector grad_theta_from_grad_eta(const DuallyFlatModel& model, const Point& p, const Vector& grad_eta) {
  return spd_solve(model.metric_eta(p.eta()), grad_eta, "grad_theta_from_grad_eta");
}

Vector objective_grad_theta(const DuallyFlatModel& model, const DualGradientObjective& f, const Point& p) {
  if (f.grad_theta) return f.grad_theta(p);
  if (f.grad_eta) return grad_theta_from_grad_eta(model, p, f.grad_eta(p));
  throw ConfigError("objective has no gradient");
}

Vector objective_grad_eta(const DuallyFlatModel& model, const DualGradientObjective& f, const Point& p) {
  if (f.grad_eta) return f.grad_eta(p);
  if (f.grad_theta) return grad_eta_from_grad_theta(model, p, f.grad_theta(p));
  throw ConfigError("objective has no gradient");
}

ThetaCoords e_geodesic_step(const DuallyFlatModel& model, const ThetaCoords& theta, const Vector& grad_eta,
                            double t) {
  check_step_args(model.dim(), theta.values(), grad_eta, t, "e_geodesic_step");
  return ThetaCoords(theta.values() - t * grad_eta);
}

EtaCoords m_geodesic_step(const DuallyFlatModel& model, const EtaCoords& eta, const Vector& grad_theta,
                          double t) {
  check_step_args(model.dim(), eta.values(), grad_theta, t, "m_geodesic_step");
  return EtaCoords(eta.values() - t * grad_theta);
}

double bregman_divergence(const DuallyFlatModel& model, const Point& r, const Point& q) {
  return model.psi(r.theta()) + model.dual_potential(q.eta()) - r.theta().values().dot(q.eta().values());
}

double dual_potential(const DuallyFlatModel& model, const EtaCoords& eta) {
  if (!model.eta_in_domain(eta)) throw DomainError("dual_potential: eta outside domain");
  return model.dual_potential(eta);
}

DualGradientObjective divergence_to(const DuallyFlatModel& model, const Point& target) {
  DualGradientObjective f;
  f.value = [&model, target](const Point& r) { return bregman_divergence(model, r, target); };
  f.grad_theta = [target](const Point& r) -> Vector { return r.eta().values() - target.eta().values(); };
  return f;
}

DualGradientObjective divergence_from(const DuallyFlatModel& model, const Point& target) {
  DualGradientObjective f;
  f.value = [&model, target](const Point& r) { return bregman_divergence(model, target, r); };
  f.grad_eta = [target](const Point& r) -> Vector { return r.theta().values() - target.theta().values(); };
  return f;
}

ThetaCoords mirror_descent_step_numeric(const DuallyFlatModel& model, const ThetaCoords& theta_k,
                                        const Vector& grad_theta, double t,
                                        const MirrorDescentOptions& options) {
  check_step_args(model.dim(), theta_k.values(), grad_theta, t, "mirror_descent_step_numeric");
  if (!(t > 0.0)) throw NumericalError("mirror_descent_step_numeric: step size must be positive");
  const Vector eta_k = model.eta_from_theta(theta_k).values();
  const double psi_k = model.psi(theta_k);

  auto objective = [&](const Vector& theta) {
    return grad_theta.dot(theta) + (model.psi(ThetaCoords(theta)) - psi_k - eta_k.dot(theta - theta_k.values())) / t;
  };

  auto gradient_at = [&](const Vector& theta) {
    return Vector(grad_theta + (model.eta_from_theta(ThetaCoords(theta)).values() - eta_k) / t);
  };

  Vector theta = theta_k.values();
  double value = objective(theta);
  Vector gradient = gradient_at(theta);
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const ThetaCoords current(theta);
    const double norm = gradient.lpNorm<Eigen::Infinity>();
    if (norm < options.gradient_tolerance) return current;
    if (iter == options.max_iterations) break;

    const Vector direction = spd_solve(model.metric_theta(current) / t, gradient, "mirror_descent_step_numeric");
    const double slope = gradient.dot(direction);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const Vector trial = theta - step * direction;
      if (!trial.allFinite() || !model.theta_in_domain(ThetaCoords(trial))) continue;
      const double trial_value = objective(trial);
      const Vector trial_gradient = gradient_at(trial);
      // Armijo, or a smaller gradient once values agree to rounding.
      if (trial_value <= value - 1e-4 * step * slope || trial_gradient.lpNorm<Eigen::Infinity>() < norm) {
        theta = trial;
        value = trial_value;
        gradient = trial_gradient;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  throw ConvergenceError("mirror_descent_step_numeric: inner Newton did not converge");
}

}  // namespace dualgeo
