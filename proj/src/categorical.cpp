#include "dualgeo/categorical.hpp"

#include <algorithm>

namespace dualgeo {

double log_sum_exp(const Vector& x) {
  if (x.size() == 0) throw DimensionError("log_sum_exp: empty input");
  const double shift = x.maxCoeff();
  if (!std::isfinite(shift)) return shift;
  return shift + std::log((x.array() - shift).exp().sum());
}

double kl_divergence(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("kl_divergence: size mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (b[i] <= 0.0) throw DomainError("kl_divergence: support of a not contained in support of b");
    total += a[i] * std::log(a[i] / b[i]);
  }
  return total;
}

CategoricalModel::CategoricalModel(std::size_t m) : m_(m) {
  if (m == 0) throw ConfigError("CategoricalModel: need at least two categories");
}

namespace {

// theta padded with the implicit zero for the last category.
Vector padded(const Vector& theta) {
  Vector full(theta.size() + 1);
  full.head(theta.size()) = theta;
  full[theta.size()] = 0.0;
  return full;
}

}  // namespace

double CategoricalModel::psi(const ThetaCoords& theta) const {
  require_dim(m_, theta.values().size(), "CategoricalModel::psi");
  return log_sum_exp(padded(theta.values()));
}

EtaCoords CategoricalModel::eta_from_theta(const ThetaCoords& theta) const {
  require_dim(m_, theta.values().size(), "CategoricalModel::eta_from_theta");
  const Vector full = padded(theta.values());
  const Vector w = (full.array() - full.maxCoeff()).exp();
  return EtaCoords(Vector(w.head(m_) / w.sum()));
}

ThetaCoords CategoricalModel::theta_from_eta(const EtaCoords& eta) const {
  require_dim(m_, eta.values().size(), "CategoricalModel::theta_from_eta");
  if (!eta_in_domain(eta)) throw DomainError("CategoricalModel::theta_from_eta: eta on or outside the simplex boundary");
  const double last = 1.0 - eta.values().sum();
  return ThetaCoords(Vector((eta.values().array() / last).log()));
}

Matrix CategoricalModel::metric_theta(const ThetaCoords& theta) const {
  const Vector eta = eta_from_theta(theta).values();
  Matrix g = -eta * eta.transpose();
  g.diagonal() += eta;
  return g;
}

Matrix CategoricalModel::metric_eta(const EtaCoords& eta) const {
  require_dim(m_, eta.values().size(), "CategoricalModel::metric_eta");
  if (!eta_in_domain(eta)) throw DomainError("CategoricalModel::metric_eta: eta outside domain");
  const double last = 1.0 - eta.values().sum();
  Matrix g = Matrix::Constant(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_), 1.0 / last);
  g.diagonal() += eta.values().cwiseInverse();
  return g;
}

bool CategoricalModel::theta_in_domain(const ThetaCoords& theta) const {
  return theta.values().size() == static_cast<Eigen::Index>(m_) && theta.values().allFinite();
}

bool CategoricalModel::eta_in_domain(const EtaCoords& eta) const {
  if (eta.values().size() != static_cast<Eigen::Index>(m_)) return false;
  return (eta.values().array() > kDomainMargin).all() && 1.0 - eta.values().sum() > kDomainMargin;
}

double CategoricalModel::dual_potential(const EtaCoords& eta) const {
  if (!eta_in_domain(eta)) throw DomainError("CategoricalModel::dual_potential: eta outside domain");
  const Vector p = probabilities(eta);
  return (p.array() * p.array().log()).sum();
}

Vector CategoricalModel::probabilities(const EtaCoords& eta) const {
  require_dim(m_, eta.values().size(), "CategoricalModel::probabilities");
  Vector p(m_ + 1);
  p.head(m_) = eta.values();
  p[m_] = 1.0 - eta.values().sum();
  return p;
}

EtaCoords CategoricalModel::eta_from_probabilities(const Vector& probabilities) const {
  require_dim(m_ + 1, probabilities.size(), "CategoricalModel::eta_from_probabilities");
  return EtaCoords(Vector(probabilities.head(m_)));
}

DualGradientObjective categorical_nll(const CategoricalModel& model, const Vector& frequencies, double sample_size) {
  require_dim(model.categories(), frequencies.size(), "categorical_nll");
  if ((frequencies.array() < 0.0).any() || std::abs(frequencies.sum() - 1.0) > 1e-9) {
    throw DomainError("categorical_nll: frequencies must be nonnegative and sum to one");
  }
  if (!(sample_size > 0.0)) throw ConfigError("categorical_nll: sample size must be positive");
  const std::size_t m = model.dim();
  DualGradientObjective f;
  f.value = [&model, frequencies, sample_size](const Point& p) {
    const Vector probs = model.probabilities(p.eta());
    double total = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (frequencies[i] == 0.0) continue;
      total -= frequencies[i] * std::log(probs[i]);
    }
    return sample_size * total;
  };
  f.grad_theta = [frequencies, sample_size, m](const Point& p) -> Vector {
    return sample_size * (p.eta().values() - frequencies.head(static_cast<Eigen::Index>(m)));
  };
  return f;
}

}  // namespace dualgeo
