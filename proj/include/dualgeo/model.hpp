#pragma once

#include "dualgeo/types.hpp"

namespace dualgeo {

/// A dually flat space given by a convex potential psi on an open theta-domain.
///
/// eta = grad psi(theta) are the dual affine coordinates and the metric in
/// theta-coordinates is the Hessian of psi. Implementations must keep the
/// theta/eta maps mutually inverse on the domain interiors.
class DuallyFlatModel {
 public:
  virtual ~DuallyFlatModel() = default;

  virtual std::size_t dim() const = 0;

  virtual double psi(const ThetaCoords& theta) const = 0;
  virtual EtaCoords eta_from_theta(const ThetaCoords& theta) const = 0;
  virtual ThetaCoords theta_from_eta(const EtaCoords& eta) const = 0;

  /// Same as eta_from_theta, but models with an iterative inverse may start
  /// from `warm_start`.
  virtual EtaCoords eta_from_theta_near(const ThetaCoords& theta, const EtaCoords& warm_start) const {
    (void)warm_start;
    return eta_from_theta(theta);
  }

  virtual Matrix metric_theta(const ThetaCoords& theta) const = 0;

  /// Metric in eta-coordinates, the inverse of metric_theta.
  virtual Matrix metric_eta(const EtaCoords& eta) const;

  virtual bool theta_in_domain(const ThetaCoords& theta) const = 0;
  virtual bool eta_in_domain(const EtaCoords& eta) const = 0;

  /// Legendre conjugate phi(eta) = <theta(eta), eta> - psi(theta(eta)).
  virtual double dual_potential(const EtaCoords& eta) const;
};

/// A point of a model, holding both affine coordinates.
///
/// The coordinate the point was built from is `native()`; the other one is
/// computed once at construction through the model's coordinate maps.
class Point {
 public:
  enum class Chart { theta, eta };

  static Point from_theta(const DuallyFlatModel& model, ThetaCoords theta);
  /// Uses `near.eta()` as a warm start for iterative theta -> eta inversions.
  static Point from_theta(const DuallyFlatModel& model, ThetaCoords theta, const Point& near);
  static Point from_eta(const DuallyFlatModel& model, EtaCoords eta);

  const ThetaCoords& theta() const { return theta_; }
  const EtaCoords& eta() const { return eta_; }
  Chart native() const { return native_; }

 private:
  Point(ThetaCoords theta, EtaCoords eta, Chart native)
      : theta_(std::move(theta)), eta_(std::move(eta)), native_(native) {}

  ThetaCoords theta_;
  EtaCoords eta_;
  Chart native_;
};

}  // namespace dualgeo
