#pragma once

#include "dualgeo/bradley_terry.hpp"
#include "dualgeo/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dualgeo {

enum class Connection { e_geodesic, m_geodesic };
enum class HalvingRule { domain_only, domain_and_decrease };
enum class StopKind { grad_norm_pi, grad_norm_eta, distance_to_target_eta };
enum class Outcome { converged, max_iters, overflow, step_underflow };

std::string to_string(Connection c);
std::string to_string(Outcome o);

struct StopRule {
  StopKind kind = StopKind::grad_norm_eta;
  double epsilon = 1e-5;
  /// Used by distance_to_target_eta.
  Vector target_eta;
  /// Used by grad_norm_pi: the gradient whose Euclidean norm is monitored.
  std::function<Vector(const Point&)> monitored_gradient;
};

struct DescentConfig {
  Connection connection = Connection::m_geodesic;
  double step_size = 1.0;
  long max_iters = 100000;
  int max_halvings = 60;
  StopRule stop;
  HalvingRule halving_rule = HalvingRule::domain_only;
  /// Store the objective value of every iterate in RunTrace::values.
  bool record_values = false;

  void validate() const;
};

struct RunTrace {
  /// Iterates in the chart the method updates (theta for e-geodesic, eta for
  /// m-geodesic, the raw simplex/strength vector for the baselines).
  std::vector<Vector> iterates;
  /// step_sizes_used[k] = t0 / 2^h_k for the h_k halvings of update k.
  std::vector<double> step_sizes_used;
  std::vector<double> values;
  long iterations = 0;
  Outcome outcome = Outcome::max_iters;
  std::string message;

  const Vector& last() const { return iterates.back(); }
  /// Total number of halvings over all accepted updates.
  long total_halvings(double initial_step) const;
};

/// Descent along e- or m-geodesics with per-iteration step halving.
///
/// Each iteration starts from cfg.step_size and halves it until the
/// proposal lies in the model's domain (and, under domain_and_decrease,
/// strictly lowers the objective). The stop rule is evaluated before every
/// update, so `iterations` counts accepted updates.
RunTrace run_geodesic_descent(const DuallyFlatModel& model, const DualGradientObjective& objective, const Point& init,
                              const DescentConfig& cfg);

struct SimplexStep {
  Vector r;
  bool overflow = false;
};

/// r_j exp(-t g_j) / sum_i r_i exp(-t g_i), evaluated literally. Any
/// non-finite intermediate is reported through `overflow`.
SimplexStep exponentiated_gradient_step(const Vector& r, const Vector& euclid_grad, double t);

struct SimplexRunConfig {
  double step_size = 1.0;
  double epsilon = 1e-5;
  long max_iters = 100000;
};

/// Repeats exponentiated_gradient_step until ||monitor(r)||_2 < epsilon.
RunTrace run_exponentiated_gradient(const Vector& init, const std::function<Vector(const Vector&)>& euclid_grad,
                                    const std::function<Vector(const Vector&)>& monitor, const SimplexRunConfig& cfg);

/// One minorize-maximize update for Bradley-Terry strengths (length N).
/// Throws DomainError when some player has no wins, since the update would
/// put that strength on the boundary.
Vector bt_mm_step(const BradleyTerryModel& model, const BTObservation& x, const Vector& pi);

/// MM iterations until ||bt_nll_grad_pi|| < epsilon.
RunTrace run_mm(const BradleyTerryModel& model, const BTObservation& x, const Vector& init, double epsilon,
                long max_iters);

/// Fixed number of plain gradient steps x <- x - t grad(x).
RunTrace run_euclidean_gd(const std::function<double(const Vector&)>& fn,
                          const std::function<Vector(const Vector&)>& grad, const Vector& init, double t, long iters);

}  // namespace dualgeo
