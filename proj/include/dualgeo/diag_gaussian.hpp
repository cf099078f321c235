#pragma once

#include "dualgeo/geometry.hpp"

namespace dualgeo {

struct MuSigma {
  Vector mu;
  Vector sigma;
};

/// Product of d independent normals N(mu_j, sigma_j^2).
///
/// theta = (mu / sigma^2, -1 / (2 sigma^2)), eta = (mu, mu^2 + sigma^2); the
/// first d entries belong to the means and the last d to the scales.
class DiagGaussianModel final : public DuallyFlatModel {
 public:
  explicit DiagGaussianModel(std::size_t d);

  std::size_t dim() const override { return 2 * d_; }
  std::size_t scalar_count() const { return d_; }

  double psi(const ThetaCoords& theta) const override;
  EtaCoords eta_from_theta(const ThetaCoords& theta) const override;
  ThetaCoords theta_from_eta(const EtaCoords& eta) const override;
  Matrix metric_theta(const ThetaCoords& theta) const override;
  Matrix metric_eta(const EtaCoords& eta) const override;
  bool theta_in_domain(const ThetaCoords& theta) const override;
  bool eta_in_domain(const EtaCoords& eta) const override;

 private:
  std::size_t d_;
};

ThetaCoords dg_theta_from_musigma(const Vector& mu, const Vector& sigma);
EtaCoords dg_eta_from_musigma(const Vector& mu, const Vector& sigma);
MuSigma dg_musigma_from_theta(const ThetaCoords& theta);
MuSigma dg_musigma_from_eta(const EtaCoords& eta);

}  // namespace dualgeo
