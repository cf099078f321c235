#include "dualgeo/mixture.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace dualgeo {

MixtureModel::MixtureModel(Matrix components, bool theta_image_is_full, NewtonOptions newton)
    : components_(std::move(components)), theta_image_is_full_(theta_image_is_full), newton_(newton) {
  const Eigen::Index n = components_.rows();
  if (n < 2) throw ConfigError("MixtureModel: need at least two components");
  if (components_.cols() < 1) throw ConfigError("MixtureModel: empty sample space");
  if (!components_.allFinite() || (components_.array() < 0.0).any()) {
    throw ConfigError("MixtureModel: component probabilities must be finite and nonnegative");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(components_.row(k).sum() - 1.0) > 1e-12) throw ConfigError("MixtureModel: component does not sum to one");
  }
  differences_ = components_.topRows(n - 1).rowwise() - components_.row(n - 1);
  Eigen::FullPivLU<Matrix> lu(differences_);
  lu.setThreshold(1e-10);
  if (lu.rank() < n - 1) throw ConfigError("MixtureModel: components are affinely dependent; theta map is not injective");
  support_ = (components_.array() > 0.0).colwise().any().transpose();
}

MixtureModel MixtureModel::four_arc_instance() {
  Matrix p = Matrix::Zero(4, 8);
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 3; ++j) p(k, (2 * k + j) % 8) = 1.0 / 3.0;
  }
  return MixtureModel(p, true);
}

MixtureModel MixtureModel::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mixture json: ") + e.what());
  }
  if (!doc.contains("omega_size") || !doc.contains("components")) {
    throw ConfigError("mixture json: expected keys omega_size and components");
  }
  const auto omega = doc.at("omega_size").get<std::int64_t>();
  const auto& rows = doc.at("components");
  if (omega <= 0 || !rows.is_array() || rows.empty()) throw ConfigError("mixture json: bad shape");
  Matrix p(static_cast<Eigen::Index>(rows.size()), omega);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!rows[k].is_array() || static_cast<std::int64_t>(rows[k].size()) != omega) {
      throw ConfigError("mixture json: component " + std::to_string(k) + " has wrong length");
    }
    for (std::int64_t x = 0; x < omega; ++x) p(static_cast<Eigen::Index>(k), x) = rows[k][static_cast<std::size_t>(x)].get<double>();
  }
  return MixtureModel(p, doc.value("theta_image_is_full", false));
}

MixtureModel MixtureModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

Vector MixtureModel::weights(const EtaCoords& eta) const {
  require_dim(dim(), eta.values().size(), "MixtureModel::weights");
  Vector w(components_.rows());
  w.head(eta.values().size()) = eta.values();
  w[w.size() - 1] = 1.0 - eta.values().sum();
  return w;
}

Vector MixtureModel::density(const EtaCoords& eta) const {
  return components_.transpose() * weights(eta);
}

double MixtureModel::density(const EtaCoords& eta, std::size_t x) const {
  if (x >= omega_size()) throw DomainError("MixtureModel::density: x outside sample space");
  return components_.col(static_cast<Eigen::Index>(x)).dot(weights(eta));
}

bool MixtureModel::eta_in_domain(const EtaCoords& eta) const {
  if (eta.values().size() != static_cast<Eigen::Index>(dim())) return false;
  return (eta.values().array() > kDomainMargin).all() && 1.0 - eta.values().sum() > kDomainMargin;
}

bool MixtureModel::theta_in_domain(const ThetaCoords& theta) const {
  if (theta.values().size() != static_cast<Eigen::Index>(dim()) || !theta.values().allFinite()) return false;
  if (theta_image_is_full_) return true;
  try {
    (void)eta_from_theta(theta);
    return true;
  } catch (const Error&) {
    return false;
  }
}

ThetaCoords MixtureModel::theta_from_eta(const EtaCoords& eta) const {
  if (!eta_in_domain(eta)) throw DomainError("MixtureModel::theta_from_eta: eta outside the open simplex");
  const Vector p = density(eta);
  Vector log_p = Vector::Zero(p.size());
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (!support_[x]) continue;
    if (!(p[x] > 0.0)) throw DomainError("MixtureModel::theta_from_eta: zero density on a supported point");
    log_p[x] = std::log(p[x]);
  }
  return ThetaCoords(Vector(differences_ * log_p));
}

Matrix MixtureModel::metric_eta(const EtaCoords& eta) const {
  if (!eta_in_domain(eta)) throw DomainError("MixtureModel::metric_eta: eta outside domain");
  const Vector p = density(eta);
  Vector inv = Vector::Zero(p.size());
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (support_[x]) inv[x] = 1.0 / p[x];
  }
  return differences_ * inv.asDiagonal() * differences_.transpose();
}

Matrix MixtureModel::metric_theta(const ThetaCoords& theta) const {
  const Matrix j = metric_eta(eta_from_theta(theta));
  Eigen::LLT<Matrix> llt(j);
  if (llt.info() != Eigen::Success) throw NumericalError("MixtureModel::metric_theta: singular Jacobian");
  return llt.solve(Matrix::Identity(j.rows(), j.cols()));
}

double MixtureModel::dual_potential(const EtaCoords& eta) const {
  if (!eta_in_domain(eta)) throw DomainError("MixtureModel::dual_potential: eta outside domain");
  const Vector p = density(eta);
  double total = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) total += p[x] * std::log(p[x]);
  }
  return total;
}

double MixtureModel::psi(const ThetaCoords& theta) const {
  const EtaCoords eta = eta_from_theta(theta);
  return theta.values().dot(eta.values()) - dual_potential(eta);
}

EtaCoords MixtureModel::eta_from_theta(const ThetaCoords& theta) const {
  const Eigen::Index n = components_.rows();
  return eta_from_theta_near(theta, EtaCoords(Vector::Constant(n - 1, 1.0 / static_cast<double>(n))));
}

EtaCoords MixtureModel::eta_from_theta_near(const ThetaCoords& theta, const EtaCoords& warm_start) const {
  require_dim(dim(), theta.values().size(), "MixtureModel::eta_from_theta");
  if (!eta_in_domain(warm_start)) throw DomainError("MixtureModel::eta_from_theta: warm start outside the simplex");
  const Vector& target = theta.values();

  // theta(eta) = grad phi(eta), so Newton on theta(eta) = target is Newton on
  // the convex merit phi(eta) - <target, eta>.
  auto merit = [&](const EtaCoords& e) { return dual_potential(e) - target.dot(e.values()); };

  EtaCoords eta = warm_start;
  Vector residual = theta_from_eta(eta).values() - target;
  double residual_norm = residual.lpNorm<Eigen::Infinity>();
  double current_merit = merit(eta);
  for (int iter = 0; iter < newton_.max_iterations; ++iter) {
    if (residual_norm < newton_.tolerance) return eta;
    const Vector step = metric_eta(eta).llt().solve(residual);
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= newton_.max_halvings; ++halving, scale *= 0.5) {
      const Vector trial_values = eta.values() - scale * step;
      if (!trial_values.allFinite()) continue;
      const EtaCoords trial(trial_values);
      if (!eta_in_domain(trial)) continue;
      const Vector trial_residual = theta_from_eta(trial).values() - target;
      const double trial_norm = trial_residual.lpNorm<Eigen::Infinity>();
      const double trial_merit = merit(trial);
      if (trial_merit <= current_merit || trial_norm < residual_norm) {
        eta = trial;
        residual = trial_residual;
        residual_norm = trial_norm;
        current_merit = trial_merit;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw ConvergenceError("MixtureModel::eta_from_theta: Newton step could not stay inside the simplex (residual " +
                             std::to_string(residual_norm) + ")");
    }
  }
  if (residual_norm < newton_.tolerance) return eta;
  throw ConvergenceError("MixtureModel::eta_from_theta: Newton did not converge (residual " +
                         std::to_string(residual_norm) + ")");
}

DualGradientObjective mixture_nll(const MixtureModel& model, const Vector& frequencies, double sample_size) {
  require_dim(model.omega_size(), frequencies.size(), "mixture_nll");
  if ((frequencies.array() < 0.0).any() || std::abs(frequencies.sum() - 1.0) > 1e-9) {
    throw DomainError("mixture_nll: frequencies must be nonnegative and sum to one");
  }
  for (std::size_t x = 0; x < model.omega_size(); ++x) {
    if (frequencies[static_cast<Eigen::Index>(x)] > 0.0 && !model.supported(x)) {
      throw DomainError("mixture_nll: observation outside the support of every component");
    }
  }
  if (!(sample_size > 0.0)) throw ConfigError("mixture_nll: sample size must be positive");
  DualGradientObjective f;
  f.value = [&model, frequencies, sample_size](const Point& p) {
    const Vector dens = model.density(p.eta());
    double total = 0.0;
    for (Eigen::Index x = 0; x < dens.size(); ++x) {
      if (frequencies[x] > 0.0) total -= frequencies[x] * std::log(dens[x]);
    }
    return sample_size * total;
  };
  f.grad_eta = [&model, frequencies, sample_size](const Point& p) -> Vector {
    const Vector dens = model.density(p.eta());
    Vector ratio = Vector::Zero(dens.size());
    for (Eigen::Index x = 0; x < dens.size(); ++x) {
      if (frequencies[x] > 0.0) ratio[x] = frequencies[x] / dens[x];
    }
    return -sample_size * (model.differences() * ratio);
  };
  return f;
}

}  // namespace dualgeo
