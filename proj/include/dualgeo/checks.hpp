#pragma once

#include "dualgeo/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dualgeo {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct CheckReport {
  std::vector<CheckResult> results;

  bool all_passed() const;
  std::vector<CheckResult> failures() const;
  /// One "PASS name (detail)" / "FAIL name (detail)" line per check.
  std::string to_text() const;
};

struct ChecksConfig {
  std::uint64_t seed = 0;
};

/// Runs every property suite of the library.
CheckReport run_checks(const ChecksConfig& cfg = {});

/// Worst ||eta(theta(eta)) - eta||_inf over the given points.
double legendre_roundtrip_error(const DuallyFlatModel& model, const std::vector<EtaCoords>& points);

/// Relative error between metric_theta and the finite-difference Jacobian of
/// eta_from_theta at theta.
double metric_hessian_error(const DuallyFlatModel& model, const ThetaCoords& theta);

/// Relative error between metric_eta and the finite-difference Jacobian of
/// theta_from_eta at eta.
double metric_eta_error(const DuallyFlatModel& model, const EtaCoords& eta);

/// Wraps a model and scales its theta-metric by (1 + delta). Everything else
/// is forwarded, so only the metric checks can notice.
class PerturbedMetricModel final : public DuallyFlatModel {
 public:
  PerturbedMetricModel(const DuallyFlatModel& base, double delta) : base_(base), delta_(delta) {}

  std::size_t dim() const override { return base_.dim(); }
  double psi(const ThetaCoords& theta) const override { return base_.psi(theta); }
  EtaCoords eta_from_theta(const ThetaCoords& theta) const override { return base_.eta_from_theta(theta); }
  ThetaCoords theta_from_eta(const EtaCoords& eta) const override { return base_.theta_from_eta(eta); }
  Matrix metric_theta(const ThetaCoords& theta) const override { return (1.0 + delta_) * base_.metric_theta(theta); }
  bool theta_in_domain(const ThetaCoords& theta) const override { return base_.theta_in_domain(theta); }
  bool eta_in_domain(const EtaCoords& eta) const override { return base_.eta_in_domain(eta); }

 private:
  const DuallyFlatModel& base_;
  double delta_;
};

}  // namespace dualgeo
