#pragma once

#include "dualgeo/geometry.hpp"

#include <string>

namespace dualgeo {

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  int max_halvings = 30;
};

/// Mixture family p(x | eta) = sum_{k<n} eta_k p_k(x) + (1 - sum eta) p_n(x)
/// over a finite sample space.
///
/// eta is the m-affine chart (open simplex). The dual e-affine chart is
/// theta^i = sum_x (p_i(x) - p_n(x)) log p(x | eta); its inverse is computed
/// by Newton's method.
class MixtureModel final : public DuallyFlatModel {
 public:
  /// `components` is n x |Omega|, one probability table per row. Rejects
  /// tables whose differences p_i - p_n are linearly dependent, since theta
  /// would then not determine eta.
  explicit MixtureModel(Matrix components, bool theta_image_is_full = false, NewtonOptions newton = {});

  /// Four uniform components on {0,1,2}, {2,3,4}, {4,5,6}, {6,7,0} over
  /// Omega = {0..7}; its theta-image is all of R^3.
  static MixtureModel four_arc_instance();

  static MixtureModel from_json(const std::string& text);
  static MixtureModel from_json_file(const std::string& path);

  std::size_t dim() const override { return static_cast<std::size_t>(components_.rows() - 1); }
  std::size_t omega_size() const { return static_cast<std::size_t>(components_.cols()); }
  const Matrix& components() const { return components_; }
  bool theta_image_is_full() const { return theta_image_is_full_; }
  const NewtonOptions& newton_options() const { return newton_; }

  double psi(const ThetaCoords& theta) const override;
  EtaCoords eta_from_theta(const ThetaCoords& theta) const override;
  EtaCoords eta_from_theta_near(const ThetaCoords& theta, const EtaCoords& warm_start) const override;
  ThetaCoords theta_from_eta(const EtaCoords& eta) const override;
  Matrix metric_theta(const ThetaCoords& theta) const override;
  /// J_ij(eta) = sum_x (p_i - p_n)(p_j - p_n)(x) / p(x | eta), the Jacobian of theta(eta).
  Matrix metric_eta(const EtaCoords& eta) const override;
  bool theta_in_domain(const ThetaCoords& theta) const override;
  bool eta_in_domain(const EtaCoords& eta) const override;
  /// Negative entropy sum_x p log p.
  double dual_potential(const EtaCoords& eta) const override;

  /// p(x | eta) for every x in Omega.
  Vector density(const EtaCoords& eta) const;
  double density(const EtaCoords& eta, std::size_t x) const;

  /// Mixture weights (length n) for eta.
  Vector weights(const EtaCoords& eta) const;

  /// Rows p_i - p_n, i < n.
  const Matrix& differences() const { return differences_; }
  /// Whether some component puts mass on x.
  bool supported(std::size_t x) const { return support_[static_cast<Eigen::Index>(x)]; }

 private:
  Matrix components_;
  Matrix differences_;
  Eigen::Array<bool, Eigen::Dynamic, 1> support_;
  bool theta_image_is_full_;
  NewtonOptions newton_;
};

/// -N sum_x freq_x log p(x | eta) for empirical frequencies over Omega.
/// D_eta = -N sum_x freq_x (p_k(x) - p_n(x)) / p(x | eta).
DualGradientObjective mixture_nll(const MixtureModel& model, const Vector& frequencies, double sample_size);

}  // namespace dualgeo
