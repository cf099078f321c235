#include "dualgeo/model.hpp"

namespace dualgeo {

Matrix DuallyFlatModel::metric_eta(const EtaCoords& eta) const {
  const Matrix g = metric_theta(theta_from_eta(eta));
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("metric_eta: metric is not positive definite");
  return llt.solve(Matrix::Identity(g.rows(), g.cols()));
}

double DuallyFlatModel::dual_potential(const EtaCoords& eta) const {
  const ThetaCoords theta = theta_from_eta(eta);
  return theta.values().dot(eta.values()) - psi(theta);
}

Point Point::from_theta(const DuallyFlatModel& model, ThetaCoords theta) {
  require_dim(model.dim(), theta.values().size(), "Point::from_theta");
  if (!model.theta_in_domain(theta)) throw DomainError("Point::from_theta: theta outside domain");
  EtaCoords eta = model.eta_from_theta(theta);
  return Point(std::move(theta), std::move(eta), Chart::theta);
}

Point Point::from_theta(const DuallyFlatModel& model, ThetaCoords theta, const Point& near) {
  require_dim(model.dim(), theta.values().size(), "Point::from_theta");
  if (!model.theta_in_domain(theta)) throw DomainError("Point::from_theta: theta outside domain");
  EtaCoords eta = model.eta_from_theta_near(theta, near.eta());
  return Point(std::move(theta), std::move(eta), Chart::theta);
}

Point Point::from_eta(const DuallyFlatModel& model, EtaCoords eta) {
  require_dim(model.dim(), eta.values().size(), "Point::from_eta");
  if (!model.eta_in_domain(eta)) throw DomainError("Point::from_eta: eta outside domain");
  ThetaCoords theta = model.theta_from_eta(eta);
  return Point(std::move(theta), std::move(eta), Chart::eta);
}

}  // namespace dualgeo
