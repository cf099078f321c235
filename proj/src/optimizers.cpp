#include "dualgeo/optimizers.hpp"

#include <cmath>
#include <optional>

namespace dualgeo {

std::string to_string(Connection c) { return c == Connection::e_geodesic ? "e-geodesic" : "m-geodesic"; }

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::converged:
      return "converged";
    case Outcome::max_iters:
      return "max_iters";
    case Outcome::overflow:
      return "overflow";
    case Outcome::step_underflow:
      return "step_underflow";
  }
  return "unknown";
}

void DescentConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ConfigError("DescentConfig: step size must be positive");
  if (max_iters < 0) throw ConfigError("DescentConfig: max_iters must be nonnegative");
  if (max_halvings < 0 || max_halvings > 60) throw ConfigError("DescentConfig: max_halvings must be in [0, 60]");
  if (!(stop.epsilon > 0.0)) throw ConfigError("StopRule: epsilon must be positive");
  if (stop.kind == StopKind::grad_norm_pi && !stop.monitored_gradient) {
    throw ConfigError("StopRule: grad_norm_pi needs a monitored gradient");
  }
}

long RunTrace::total_halvings(double initial_step) const {
  long total = 0;
  for (double t : step_sizes_used) total += std::lround(std::log2(initial_step / t));
  return total;
}

namespace {

bool stop_reached(const DuallyFlatModel& model, const DualGradientObjective& objective, const StopRule& rule,
                  const Point& p) {
  switch (rule.kind) {
    case StopKind::distance_to_target_eta:
      return (p.eta().values() - rule.target_eta).norm() < rule.epsilon;
    case StopKind::grad_norm_eta:
      return objective_grad_eta(model, objective, p).norm() < rule.epsilon;
    case StopKind::grad_norm_pi:
      return rule.monitored_gradient(p).norm() < rule.epsilon;
  }
  return false;
}

}  // namespace

RunTrace run_geodesic_descent(const DuallyFlatModel& model, const DualGradientObjective& objective, const Point& init,
                              const DescentConfig& cfg) {
  cfg.validate();
  if (cfg.stop.kind == StopKind::distance_to_target_eta) require_dim(model.dim(), cfg.stop.target_eta.size(), "stop target");
  const bool needs_values = cfg.record_values || cfg.halving_rule == HalvingRule::domain_and_decrease;
  if (needs_values && !objective.value) throw ConfigError("run_geodesic_descent: objective has no value function");
  const bool e_step = cfg.connection == Connection::e_geodesic;

  RunTrace trace;
  Point current = init;
  double current_value = needs_values ? objective.value(current) : 0.0;
  auto native = [&](const Point& p) { return e_step ? p.theta().values() : p.eta().values(); };
  trace.iterates.push_back(native(current));
  if (cfg.record_values) trace.values.push_back(current_value);

  while (true) {
    if (stop_reached(model, objective, cfg.stop, current)) {
      trace.outcome = Outcome::converged;
      return trace;
    }
    if (trace.iterations >= cfg.max_iters) {
      trace.outcome = Outcome::max_iters;
      return trace;
    }
    const Vector grad = e_step ? objective_grad_eta(model, objective, current)
                               : objective_grad_theta(model, objective, current);
    if (!grad.allFinite()) throw NumericalError("run_geodesic_descent: non-finite gradient");

    double t = cfg.step_size;
    bool accepted = false;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, t *= 0.5) {
      std::optional<Point> proposal;
      if (e_step) {
        const Vector theta = current.theta().values() - t * grad;
        if (!theta.allFinite()) continue;
        ThetaCoords next(theta);
        if (!model.theta_in_domain(next)) continue;
        proposal = Point::from_theta(model, std::move(next), current);
      } else {
        const Vector eta = current.eta().values() - t * grad;
        if (!eta.allFinite()) continue;
        EtaCoords next(eta);
        if (!model.eta_in_domain(next)) continue;
        proposal = Point::from_eta(model, std::move(next));
      }
      double value = 0.0;
      if (needs_values) {
        value = objective.value(*proposal);
        if (cfg.halving_rule == HalvingRule::domain_and_decrease && !(value < current_value)) continue;
      }
      current = std::move(*proposal);
      current_value = value;
      accepted = true;
      break;
    }
    if (!accepted) {
      trace.outcome = Outcome::step_underflow;
      trace.message = "no acceptable step after " + std::to_string(cfg.max_halvings) + " halvings";
      return trace;
    }
    ++trace.iterations;
    trace.step_sizes_used.push_back(t);
    trace.iterates.push_back(native(current));
    if (cfg.record_values) trace.values.push_back(current_value);
  }
}

SimplexStep exponentiated_gradient_step(const Vector& r, const Vector& euclid_grad, double t) {
  if (r.size() != euclid_grad.size()) throw DimensionError("exponentiated_gradient_step: size mismatch");
  SimplexStep out;
  if (!euclid_grad.allFinite()) {
    out.r = r;
    out.overflow = true;
    return out;
  }
  Vector w(r.size());
  for (Eigen::Index j = 0; j < r.size(); ++j) w[j] = r[j] * std::exp(-t * euclid_grad[j]);
  const double total = w.sum();
  if (!w.allFinite() || !std::isfinite(total) || !(total > 0.0)) {
    out.r = r;
    out.overflow = true;
    return out;
  }
  out.r = w / total;
  return out;
}

RunTrace run_exponentiated_gradient(const Vector& init, const std::function<Vector(const Vector&)>& euclid_grad,
                                    const std::function<Vector(const Vector&)>& monitor, const SimplexRunConfig& cfg) {
  if (!(cfg.step_size > 0.0) || !(cfg.epsilon > 0.0)) throw ConfigError("run_exponentiated_gradient: bad config");
  RunTrace trace;
  Vector r = init;
  trace.iterates.push_back(r);
  while (true) {
    const Vector watched = monitor(r);
    if (!watched.allFinite()) {
      trace.outcome = Outcome::overflow;
      trace.message = "non-finite gradient";
      return trace;
    }
    if (watched.norm() < cfg.epsilon) {
      trace.outcome = Outcome::converged;
      return trace;
    }
    if (trace.iterations >= cfg.max_iters) {
      trace.outcome = Outcome::max_iters;
      return trace;
    }
    const SimplexStep step = exponentiated_gradient_step(r, euclid_grad(r), cfg.step_size);
    if (step.overflow) {
      trace.outcome = Outcome::overflow;
      trace.message = "exponential overflow at update " + std::to_string(trace.iterations + 1);
      return trace;
    }
    r = step.r;
    ++trace.iterations;
    trace.step_sizes_used.push_back(cfg.step_size);
    trace.iterates.push_back(r);
  }
}

Vector bt_mm_step(const BradleyTerryModel& model, const BTObservation& x, const Vector& pi) {
  model.check_observation(x);
  require_dim(model.players(), pi.size(), "bt_mm_step");
  if ((pi.array() <= 0.0).any()) throw DomainError("bt_mm_step: strengths must be positive");
  const CountMatrix& n = model.match_counts();
  const Vector wins = x.sufficient_statistics();
  Vector next(pi.size());
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    double denom = 0.0;
    for (Eigen::Index j = 0; j < pi.size(); ++j) {
      if (j != i && n(i, j) != 0) denom += static_cast<double>(n(i, j)) / (pi[i] + pi[j]);
    }
    if (wins[i] == 0.0) throw DomainError("bt_mm_step: player " + std::to_string(i) + " has no wins");
    next[i] = wins[i] / denom;
  }
  return next / next.sum();
}

RunTrace run_mm(const BradleyTerryModel& model, const BTObservation& x, const Vector& init, double epsilon,
                long max_iters) {
  if (!(epsilon > 0.0)) throw ConfigError("run_mm: epsilon must be positive");
  RunTrace trace;
  Vector pi = init;
  trace.iterates.push_back(pi);
  while (true) {
    if (bt_nll_grad_pi(x, pi).norm() < epsilon) {
      trace.outcome = Outcome::converged;
      return trace;
    }
    if (trace.iterations >= max_iters) {
      trace.outcome = Outcome::max_iters;
      trace.message = "iteration budget exhausted; the maximum likelihood estimate may not exist";
      return trace;
    }
    pi = bt_mm_step(model, x, pi);
    ++trace.iterations;
    trace.iterates.push_back(pi);
  }
}

RunTrace run_euclidean_gd(const std::function<double(const Vector&)>& fn,
                          const std::function<Vector(const Vector&)>& grad, const Vector& init, double t, long iters) {
  if (iters < 0) throw ConfigError("run_euclidean_gd: negative iteration count");
  RunTrace trace;
  Vector x = init;
  trace.iterates.push_back(x);
  if (fn) trace.values.push_back(fn(x));
  for (long k = 0; k < iters; ++k) {
    const Vector g = grad(x);
    if (!g.allFinite()) throw NumericalError("run_euclidean_gd: non-finite gradient");
    x -= t * g;
    ++trace.iterations;
    trace.step_sizes_used.push_back(t);
    trace.iterates.push_back(x);
    if (fn) trace.values.push_back(fn(x));
  }
  trace.outcome = Outcome::max_iters;
  return trace;
}

}  // namespace dualgeo
