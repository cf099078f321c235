#include "dualgeo/diag_gaussian.hpp"

#include <numbers>

namespace dualgeo {

namespace {

void check_musigma(const Vector& mu, const Vector& sigma) {
  if (mu.size() != sigma.size()) throw DimensionError("diagonal Gaussian: mu and sigma lengths differ");
  require_finite(mu, "diagonal Gaussian mu");
  require_finite(sigma, "diagonal Gaussian sigma");
  if ((sigma.array() <= 0.0).any()) throw DomainError("diagonal Gaussian: sigma must be positive");
}

Eigen::Index half(const Vector& v, const char* what) {
  if (v.size() % 2 != 0) throw DimensionError(std::string(what) + ": coordinate length must be even");
  return v.size() / 2;
}

}  // namespace

ThetaCoords dg_theta_from_musigma(const Vector& mu, const Vector& sigma) {
  check_musigma(mu, sigma);
  const Eigen::Index d = mu.size();
  Vector theta(2 * d);
  const Eigen::ArrayXd var = sigma.array().square();
  theta.head(d) = (mu.array() / var).matrix();
  theta.tail(d) = (-0.5 / var).matrix();
  return ThetaCoords(theta);
}

EtaCoords dg_eta_from_musigma(const Vector& mu, const Vector& sigma) {
  check_musigma(mu, sigma);
  const Eigen::Index d = mu.size();
  Vector eta(2 * d);
  eta.head(d) = mu;
  eta.tail(d) = (mu.array().square() + sigma.array().square()).matrix();
  return EtaCoords(eta);
}

MuSigma dg_musigma_from_theta(const ThetaCoords& theta) {
  const Vector& t = theta.values();
  const Eigen::Index d = half(t, "dg_musigma_from_theta");
  if ((t.tail(d).array() >= 0.0).any()) throw DomainError("dg_musigma_from_theta: scale coordinates must be negative");
  const Eigen::ArrayXd var = -0.5 / t.tail(d).array();
  return MuSigma{(t.head(d).array() * var).matrix(), var.sqrt().matrix()};
}

MuSigma dg_musigma_from_eta(const EtaCoords& eta) {
  const Vector& e = eta.values();
  const Eigen::Index d = half(e, "dg_musigma_from_eta");
  const Eigen::ArrayXd var = e.tail(d).array() - e.head(d).array().square();
  if ((var <= 0.0).any()) throw DomainError("dg_musigma_from_eta: second moments must exceed squared means");
  return MuSigma{e.head(d), var.sqrt().matrix()};
}

DiagGaussianModel::DiagGaussianModel(std::size_t d) : d_(d) {
  if (d == 0) throw ConfigError("DiagGaussianModel: need at least one coordinate");
}

double DiagGaussianModel::psi(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "DiagGaussianModel::psi");
  if (!theta_in_domain(theta)) throw DomainError("DiagGaussianModel::psi: theta outside domain");
  const auto d = static_cast<Eigen::Index>(d_);
  const Eigen::ArrayXd lin = theta.values().head(d).array();
  const Eigen::ArrayXd quad = theta.values().tail(d).array();
  return (-lin.square() / (4.0 * quad) + 0.5 * std::log(std::numbers::pi) - 0.5 * (-quad).log()).sum();
}

EtaCoords DiagGaussianModel::eta_from_theta(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "DiagGaussianModel::eta_from_theta");
  const MuSigma ms = dg_musigma_from_theta(theta);
  return dg_eta_from_musigma(ms.mu, ms.sigma);
}

ThetaCoords DiagGaussianModel::theta_from_eta(const EtaCoords& eta) const {
  require_dim(dim(), eta.values().size(), "DiagGaussianModel::theta_from_eta");
  const MuSigma ms = dg_musigma_from_eta(eta);
  return dg_theta_from_musigma(ms.mu, ms.sigma);
}

Matrix DiagGaussianModel::metric_theta(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "DiagGaussianModel::metric_theta");
  const MuSigma ms = dg_musigma_from_theta(theta);
  const auto d = static_cast<Eigen::Index>(d_);
  Matrix g = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double mu = ms.mu[j];
    const double var = ms.sigma[j] * ms.sigma[j];
    g(j, j) = var;
    g(j, d + j) = g(d + j, j) = 2.0 * mu * var;
    g(d + j, d + j) = 4.0 * mu * mu * var + 2.0 * var * var;
  }
  return g;
}

Matrix DiagGaussianModel::metric_eta(const EtaCoords& eta) const {
  require_dim(dim(), eta.values().size(), "DiagGaussianModel::metric_eta");
  const MuSigma ms = dg_musigma_from_eta(eta);
  const auto d = static_cast<Eigen::Index>(d_);
  Matrix g = Matrix::Zero(2 * d, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    // Inverse of the 2x2 block [[v, 2 mu v], [2 mu v, 4 mu^2 v + 2 v^2]], determinant 2 v^3.
    const double mu = ms.mu[j];
    const double var = ms.sigma[j] * ms.sigma[j];
    const double det = 2.0 * var * var * var;
    g(j, j) = (4.0 * mu * mu * var + 2.0 * var * var) / det;
    g(j, d + j) = g(d + j, j) = -2.0 * mu * var / det;
    g(d + j, d + j) = var / det;
  }
  return g;
}

bool DiagGaussianModel::theta_in_domain(const ThetaCoords& theta) const {
  const Vector& t = theta.values();
  if (t.size() != static_cast<Eigen::Index>(dim()) || !t.allFinite()) return false;
  return (t.tail(static_cast<Eigen::Index>(d_)).array() < -kDomainMargin).all();
}

bool DiagGaussianModel::eta_in_domain(const EtaCoords& eta) const {
  const Vector& e = eta.values();
  if (e.size() != static_cast<Eigen::Index>(dim()) || !e.allFinite()) return false;
  const auto d = static_cast<Eigen::Index>(d_);
  return (e.tail(d).array() - e.head(d).array().square() > kDomainMargin).all();
}

}  // namespace dualgeo
