#pragma once

#include "dualgeo/geometry.hpp"

namespace dualgeo {

/// Categorical distribution over m + 1 outcomes.
///
/// eta holds the first m probabilities (the last is 1 - sum eta), theta^i =
/// log(eta_i / eta_{m+1}) and psi(theta) = log(sum exp theta^i + 1). The
/// theta-domain is all of R^m.
class CategoricalModel final : public DuallyFlatModel {
 public:
  explicit CategoricalModel(std::size_t m);

  std::size_t dim() const override { return m_; }
  std::size_t categories() const { return m_ + 1; }

  double psi(const ThetaCoords& theta) const override;
  EtaCoords eta_from_theta(const ThetaCoords& theta) const override;
  ThetaCoords theta_from_eta(const EtaCoords& eta) const override;
  Matrix metric_theta(const ThetaCoords& theta) const override;
  Matrix metric_eta(const EtaCoords& eta) const override;
  bool theta_in_domain(const ThetaCoords& theta) const override;
  bool eta_in_domain(const EtaCoords& eta) const override;
  double dual_potential(const EtaCoords& eta) const override;

  /// Full probability vector (length m + 1) of a point given by eta.
  Vector probabilities(const EtaCoords& eta) const;
  EtaCoords eta_from_probabilities(const Vector& probabilities) const;

 private:
  std::size_t m_;
};

/// Negative log-likelihood -N sum_i freq_i log eta_i of N observations with
/// empirical frequencies `frequencies` (length m + 1, summing to one).
/// D_theta = N (eta(theta) - freq_{1..m}).
DualGradientObjective categorical_nll(const CategoricalModel& model, const Vector& frequencies, double sample_size);

/// sum_i a_i log(a_i / b_i) over full probability vectors; terms with a_i = 0
/// contribute nothing.
double kl_divergence(const Vector& a, const Vector& b);

/// Numerically stable log(sum_i exp(x_i)).
double log_sum_exp(const Vector& x);

}  // namespace dualgeo
