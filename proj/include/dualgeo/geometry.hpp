#pragma once

#include "dualgeo/finite_difference.hpp"
#include "dualgeo/model.hpp"

#include <functional>

namespace dualgeo {

/// A function on a model together with its gradients in either affine chart.
///
/// At least one of grad_theta / grad_eta must be set. The missing one is
/// obtained through the metric: D_eta f = g_theta^{-1} D_theta f and
/// D_theta f = g_eta^{-1} D_eta f.
struct DualGradientObjective {
  std::function<double(const Point&)> value;
  std::function<Vector(const Point&)> grad_theta;
  std::function<Vector(const Point&)> grad_eta;
};

Vector objective_grad_theta(const DuallyFlatModel& model, const DualGradientObjective& f, const Point& p);
Vector objective_grad_eta(const DuallyFlatModel& model, const DualGradientObjective& f, const Point& p);

// Chain rule through the metric; both solve a symmetric positive-definite system.
Vector grad_eta_from_grad_theta(const DuallyFlatModel& model, const Point& p, const Vector& grad_theta);
Vector grad_theta_from_grad_eta(const DuallyFlatModel& model, const Point& p, const Vector& grad_eta);

/// Straight line in theta along -D_eta f: theta - t * grad_eta. The result may
/// leave the theta-domain; callers decide how to shrink t.
ThetaCoords e_geodesic_step(const DuallyFlatModel& model, const ThetaCoords& theta, const Vector& grad_eta,
                            double t);

/// Straight line in eta along -D_theta f: eta - t * grad_theta.
EtaCoords m_geodesic_step(const DuallyFlatModel& model, const EtaCoords& eta, const Vector& grad_theta,
                          double t);

/// Canonical divergence psi(theta(r)) + phi(eta(q)) - <theta(r), eta(q)>.
///
/// For an exponential family this is the KL divergence of the distribution r
/// measured from q, i.e. sum_x q(x) log(q(x)/r(x)). Minimizing it over r is a
/// one-step problem for the m-geodesic update; minimizing over q is a
/// one-step problem for the e-geodesic update.
double bregman_divergence(const DuallyFlatModel& model, const Point& r, const Point& q);

double dual_potential(const DuallyFlatModel& model, const EtaCoords& eta);

/// f(r) = B(r, target). D_theta f(r) = eta(r) - eta(target).
DualGradientObjective divergence_to(const DuallyFlatModel& model, const Point& target);

/// h(r) = B(target, r). D_eta h(r) = theta(r) - theta(target).
DualGradientObjective divergence_from(const DuallyFlatModel& model, const Point& target);

struct MirrorDescentOptions {
  double gradient_tolerance = 1e-12;
  int max_iterations = 100;
};

/// Solves argmin_theta <grad_theta, theta> + B(theta, theta_k) / t by damped
/// Newton iteration. Used as a reference for the m-geodesic step; not meant
/// for production loops.
ThetaCoords mirror_descent_step_numeric(const DuallyFlatModel& model, const ThetaCoords& theta_k,
                                        const Vector& grad_theta, double t,
                                        const MirrorDescentOptions& options = {});

}  // namespace dualgeo
