#pragma once

#include "dualgeo/geometry.hpp"

#include <string>

namespace dualgeo {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Match results: wins(i, j) is how often player i beat player j.
class BTObservation {
 public:
  explicit BTObservation(CountMatrix wins);

  std::size_t players() const { return static_cast<std::size_t>(wins_.rows()); }
  const CountMatrix& wins() const { return wins_; }
  /// n_ij = x_ij + x_ji.
  CountMatrix match_counts() const;
  /// T_i = sum_{j != i} x_ij, length N.
  Vector sufficient_statistics() const;

  /// The three-player table x12=7, x13=8, x21=3, x23=5, x31=2, x32=5.
  static BTObservation three_player_example();

  /// CSV rows `i,j,x_ij,x_ji` with 0-based player indices and a header line.
  static BTObservation from_csv(const std::string& text);
  static BTObservation from_csv_file(const std::string& path);

 private:
  CountMatrix wins_;
};

/// Bradley-Terry model as an exponential family in theta^i = log(pi_i / pi_N),
/// i < N, with psi(theta) = sum_{i<j} n_ij log(exp theta^i + exp theta^j) and
/// theta^N = 0. eta_i = sum_{j != i} n_ij sigma(theta^i - theta^j) is the
/// expected number of wins of player i.
class BradleyTerryModel final : public DuallyFlatModel {
 public:
  explicit BradleyTerryModel(CountMatrix match_counts);
  static BradleyTerryModel for_observation(const BTObservation& x);

  std::size_t players() const { return static_cast<std::size_t>(n_.rows()); }
  std::size_t dim() const override { return players() - 1; }
  const CountMatrix& match_counts() const { return n_; }

  double psi(const ThetaCoords& theta) const override;
  EtaCoords eta_from_theta(const ThetaCoords& theta) const override;
  /// Newton on the convex problem min psi(theta) - <theta, eta>.
  ThetaCoords theta_from_eta(const EtaCoords& eta) const override;
  Matrix metric_theta(const ThetaCoords& theta) const override;
  bool theta_in_domain(const ThetaCoords& theta) const override;
  /// eta is in the domain when theta_from_eta converges.
  bool eta_in_domain(const EtaCoords& eta) const override;

  /// Checks x_ij + x_ji = n_ij for all pairs.
  void check_observation(const BTObservation& x) const;

 private:
  CountMatrix n_;
};

/// pi_i = exp theta^i / (1 + sum_k exp theta^k), returned with pi_N appended.
Vector bt_pi_from_theta(const ThetaCoords& theta);
ThetaCoords bt_theta_from_pi(const Vector& pi);

/// Negative log-likelihood in theta: psi(theta) - <theta, T_{1..N-1}>.
DualGradientObjective bt_nll(const BradleyTerryModel& model, const BTObservation& x);

/// -sum_{i<j} [x_ij log pi_i + x_ji log pi_j - n_ij log(pi_i + pi_j)] for a
/// full strength vector (length N); no normalization is imposed.
double bt_nll_pi(const BTObservation& x, const Vector& pi);

/// Euclidean gradient of bt_nll_pi in all N coordinates.
Vector bt_nll_euclidean_grad(const BTObservation& x, const Vector& pi);

/// Gradient of bt_nll_pi with respect to pi_1..pi_{N-1} where pi_N = 1 - sum.
Vector bt_nll_grad_pi(const BTObservation& x, const Vector& pi);

}  // namespace dualgeo
