#include "dualgeo/varinf.hpp"

#include <cstdio>
#include <numbers>
#include <sstream>

namespace dualgeo {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

// W (M x D) viewed over a row-major vec(W).
Eigen::Map<const RowMajorMatrix> as_weights(const Vector& w, Eigen::Index features, Eigen::Index classes) {
  return Eigen::Map<const RowMajorMatrix>(w.data(), features, classes);
}

void check_shapes(const VIDataset& data, const Vector& mu, const Vector& sigma, const Matrix& noise) {
  const Eigen::Index md = static_cast<Eigen::Index>(data.features() * data.classes());
  if (mu.size() != md || sigma.size() != md) throw DimensionError("variational parameters must have length M * D");
  if (noise.cols() != md) throw DimensionError("noise must have M * D columns");
  if (noise.rows() < 1) throw DimensionError("noise needs at least one row");
  if ((sigma.array() <= 0.0).any()) throw DomainError("sigma must be positive");
}

// Row-wise log-softmax of the logits X W.
Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double shift = logits.row(i).maxCoeff();
    const double lse = shift + std::log((logits.row(i).array() - shift).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

}  // namespace

void VIDataset::validate() const {
  if (X.rows() != Y.rows()) throw DimensionError("VIDataset: X and Y row counts differ");
  if (X.cols() < 1 || Y.cols() < 1) throw DimensionError("VIDataset: need at least one feature and one class");
  if (!X.allFinite()) throw NumericalError("VIDataset: non-finite feature");
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    const bool binary = ((Y.row(i).array() == 0.0) || (Y.row(i).array() == 1.0)).all();
    if (!binary || Y.row(i).sum() != 1.0) throw DomainError("VIDataset: row " + std::to_string(i) + " of Y is not one-hot");
  }
}

VIDataset VIDataset::rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > samples()) throw DimensionError("VIDataset::rows: bad range");
  const auto b = static_cast<Eigen::Index>(begin);
  const auto n = static_cast<Eigen::Index>(end - begin);
  return VIDataset{X.middleRows(b, n), Y.middleRows(b, n)};
}

std::size_t VIDataset::label(std::size_t i) const {
  Eigen::Index idx;
  Y.row(static_cast<Eigen::Index>(i)).maxCoeff(&idx);
  return static_cast<std::size_t>(idx);
}

VIDataset VIDataset::from_csv(const std::string& text, std::size_t classes) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset csv: missing header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("dataset csv: non-numeric cell '" + cell + "'");
      }
    }
    if (!rows.empty() && values.size() != rows.front().size()) throw ConfigError("dataset csv: ragged rows");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ConfigError("dataset csv: no rows");
  const std::size_t width = rows.front().size();
  if (classes == 0 || width <= classes) throw ConfigError("dataset csv: need feature columns before the one-hot columns");
  const std::size_t features = width - classes;
  VIDataset data{Matrix(rows.size(), features), Matrix(rows.size(), classes)};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const auto r = static_cast<Eigen::Index>(i);
      if (j < features) {
        data.X(r, static_cast<Eigen::Index>(j)) = rows[i][j];
      } else {
        data.Y(r, static_cast<Eigen::Index>(j - features)) = rows[i][j];
      }
    }
  }
  data.validate();
  return data;
}

std::string VIDataset::to_csv() const {
  std::string out;
  for (Eigen::Index j = 0; j < X.cols(); ++j) out += (j ? ",x" : "x") + std::to_string(j);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) out += ",y" + std::to_string(j);
  out += '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
      if (j) out += ',';
      out += buf;
    }
    for (Eigen::Index j = 0; j < Y.cols(); ++j) out += Y(i, j) == 1.0 ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double softplus_inverse(double y) {
  if (!(y > 0.0)) throw DomainError("softplus_inverse: argument must be positive");
  return y > 20.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

VIState VIState::from_mu_rho(Vector mu, Vector rho) {
  if (mu.size() != rho.size()) throw DimensionError("VIState: mu and rho lengths differ");
  require_finite(mu, "VIState mu");
  require_finite(rho, "VIState rho");
  Vector sigma = rho.unaryExpr([](double r) { return softplus(r); });
  if ((sigma.array() <= 0.0).any()) throw DomainError("VIState: sigma underflowed to zero");
  return VIState(std::move(mu), std::move(sigma), std::move(rho));
}

VIState VIState::from_mu_sigma(Vector mu, Vector sigma) {
  if (mu.size() != sigma.size()) throw DimensionError("VIState: mu and sigma lengths differ");
  require_finite(mu, "VIState mu");
  require_finite(sigma, "VIState sigma");
  if ((sigma.array() <= 0.0).any()) throw DomainError("VIState: sigma must be positive");
  Vector rho = sigma.unaryExpr([](double s) { return softplus_inverse(s); });
  return VIState(std::move(mu), std::move(sigma), std::move(rho));
}

void MCConfig::validate() const {
  if (K < 1 || L < 1) throw ConfigError("MCConfig: K and L must be at least 1");
  if (!(lambda > 0.0)) throw ConfigError("MCConfig: lambda must be positive");
}

Vector softmax(const Vector& a) {
  require_finite(a, "softmax");
  const Vector e = (a.array() - a.maxCoeff()).exp();
  return e / e.sum();
}

double cat_logpdf(const Vector& y, const Vector& s) {
  if (y.size() != s.size()) throw DimensionError("cat_logpdf: size mismatch");
  double total = 0.0;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (y[k] != 0.0) total += y[k] * std::log(s[k]);
  }
  return total;
}

double mc_objective(const VIDataset& data, const Vector& mu, const Vector& sigma, double lambda, const Matrix& noise) {
  check_shapes(data, mu, sigma, noise);
  const auto features = static_cast<Eigen::Index>(data.features());
  const auto classes = static_cast<Eigen::Index>(data.classes());
  const double log_sigma_sum = sigma.array().log().sum();
  const auto md = static_cast<double>(mu.size());
  double total = 0.0;
  for (Eigen::Index k = 0; k < noise.rows(); ++k) {
    const Vector eps = noise.row(k).transpose();
    const Vector w = mu + sigma.cwiseProduct(eps);
    const double log_q = -md * kHalfLogTwoPi - log_sigma_sum - 0.5 * eps.squaredNorm();
    const double log_prior = md * (0.5 * std::log(lambda) - kHalfLogTwoPi) - 0.5 * lambda * w.squaredNorm();
    double log_lik = 0.0;
    if (data.samples() > 0) {
      const Matrix logits = data.X * as_weights(w, features, classes);
      log_lik = (data.Y.array() * log_softmax_rows(logits).array()).sum();
    }
    total += log_q - log_lik - log_prior;
  }
  const double value = total / static_cast<double>(noise.rows());
  if (!std::isfinite(value)) throw NumericalError("mc_objective: non-finite value");
  return value;
}

double mc_objective(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise) {
  return mc_objective(data, state.mu(), state.sigma(), cfg.lambda, noise);
}

MuSigmaGradient mc_grad_musigma(const VIDataset& data, const Vector& mu, const Vector& sigma, double lambda,
                                const Matrix& noise) {
  check_shapes(data, mu, sigma, noise);
  const auto features = static_cast<Eigen::Index>(data.features());
  const auto classes = static_cast<Eigen::Index>(data.classes());
  Vector d_mu = Vector::Zero(mu.size());
  Vector d_sigma = Vector::Zero(mu.size());
  RowMajorMatrix grad_w(features, classes);
  for (Eigen::Index k = 0; k < noise.rows(); ++k) {
    const Vector eps = noise.row(k).transpose();
    const Vector w = mu + sigma.cwiseProduct(eps);
    // d/dW of -log p(Y|X,W) - log p(W).
    if (data.samples() > 0) {
      const Matrix logits = data.X * as_weights(w, features, classes);
      const Matrix probs = log_softmax_rows(logits).array().exp();
      grad_w = data.X.transpose() * (probs - data.Y);
    } else {
      grad_w.setZero();
    }
    const Vector g = Eigen::Map<const Vector>(grad_w.data(), grad_w.size()) + lambda * w;
    d_mu += g;
    d_sigma += g.cwiseProduct(eps);
  }
  const double inv_k = 1.0 / static_cast<double>(noise.rows());
  d_mu *= inv_k;
  d_sigma = d_sigma * inv_k - sigma.cwiseInverse();
  if (!d_mu.allFinite() || !d_sigma.allFinite()) throw NumericalError("mc_grad_musigma: non-finite gradient");
  return MuSigmaGradient{d_mu, d_sigma};
}

MuSigmaGradient mc_grad_musigma(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise) {
  return mc_grad_musigma(data, state.mu(), state.sigma(), cfg.lambda, noise);
}

Vector mc_grad_rho(const VIState& state, const MuSigmaGradient& g) {
  return g.d_sigma.cwiseProduct(state.rho().unaryExpr([](double r) { return logistic(r); }));
}

DualGradient musigma_to_dual(const Vector& mu, const Vector& sigma, const MuSigmaGradient& g) {
  const Eigen::Index d = mu.size();
  const Eigen::ArrayXd m = mu.array();
  const Eigen::ArrayXd s = sigma.array();
  const Eigen::ArrayXd gm = g.d_mu.array();
  const Eigen::ArrayXd gs = g.d_sigma.array();
  DualGradient out{Vector(2 * d), Vector(2 * d)};
  // mu = eta_1, sigma = sqrt(eta_2 - eta_1^2).
  out.d_eta.head(d) = (gm - gs * m / s).matrix();
  out.d_eta.tail(d) = (gs / (2.0 * s)).matrix();
  // mu = -theta_1 / (2 theta_2), sigma = (-2 theta_2)^{-1/2}.
  out.d_theta.head(d) = (gm * s.square()).matrix();
  out.d_theta.tail(d) = (2.0 * m * s.square() * gm + s.cube() * gs).matrix();
  return out;
}

DualGradient mc_grad_dual(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise) {
  return musigma_to_dual(state.mu(), state.sigma(), mc_grad_musigma(data, state, cfg, noise));
}

std::string to_string(VIMethod m) {
  switch (m) {
    case VIMethod::gradient:
      return "gradient";
    case VIMethod::e_geodesic:
      return "e-geodesic";
    case VIMethod::m_geodesic:
      return "m-geodesic";
  }
  return "unknown";
}

VIStepResult vi_single_iteration(const VIDataset& data, const VIState& init, VIMethod method, double lr,
                                 const MCConfig& cfg, const Matrix& noise, int max_halvings) {
  cfg.validate();
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("vi_single_iteration: lr must be finite and nonnegative");
  const MuSigmaGradient g = mc_grad_musigma(data, init, cfg, noise);

  if (method == VIMethod::gradient) {
    const Vector mu = init.mu() - lr * g.d_mu;
    const Vector rho = init.rho() - lr * mc_grad_rho(init, g);
    return VIStepResult{VIState::from_mu_rho(mu, rho), lr, 0};
  }

  const DiagGaussianModel family(init.size());
  const DualGradient dual = musigma_to_dual(init.mu(), init.sigma(), g);
  double t = lr;
  for (int halving = 0; halving <= max_halvings; ++halving, t *= 0.5) {
    if (method == VIMethod::e_geodesic) {
      const Vector theta = dg_theta_from_musigma(init.mu(), init.sigma()).values() - t * dual.d_eta;
      if (!theta.allFinite() || !family.theta_in_domain(ThetaCoords(theta))) continue;
      const MuSigma ms = dg_musigma_from_theta(ThetaCoords(theta));
      return VIStepResult{VIState::from_mu_sigma(ms.mu, ms.sigma), t, halving};
    }
    const Vector eta = dg_eta_from_musigma(init.mu(), init.sigma()).values() - t * dual.d_theta;
    if (!eta.allFinite() || !family.eta_in_domain(EtaCoords(eta))) continue;
    const MuSigma ms = dg_musigma_from_eta(EtaCoords(eta));
    return VIStepResult{VIState::from_mu_sigma(ms.mu, ms.sigma), t, halving};
  }
  throw ConvergenceError("vi_single_iteration: step underflow after " + std::to_string(max_halvings) + " halvings");
}

VIStepResult vi_single_iteration(const VIDataset& data, const VIState& init, VIMethod method, double lr,
                                 const MCConfig& cfg) {
  Rng rng(cfg.seed);
  const Matrix noise = rng.normal_matrix(static_cast<Eigen::Index>(cfg.K), static_cast<Eigen::Index>(init.size()));
  return vi_single_iteration(data, init, method, lr, cfg, noise);
}

std::size_t predict(const Vector& x, const VIState& state, const Matrix& noise) {
  const auto classes = static_cast<Eigen::Index>(state.size()) / x.size();
  if (x.size() == 0 || classes * x.size() != static_cast<Eigen::Index>(state.size())) {
    throw DimensionError("predict: feature length does not divide the parameter length");
  }
  if (noise.cols() != static_cast<Eigen::Index>(state.size()) || noise.rows() < 1) {
    throw DimensionError("predict: noise must be L x MD with L >= 1");
  }
  Vector avg = Vector::Zero(classes);
  for (Eigen::Index l = 0; l < noise.rows(); ++l) {
    const Vector w = state.mu() + state.sigma().cwiseProduct(noise.row(l).transpose());
    avg += softmax(as_weights(w, x.size(), classes).transpose() * x);
  }
  avg /= static_cast<double>(noise.rows());
  std::size_t best = 0;
  for (Eigen::Index k = 1; k < classes; ++k) {
    if (avg[k] > avg[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(k);
  }
  return best;
}

double accuracy(const VIDataset& data, const VIState& state, const Matrix& noise) {
  if (data.samples() == 0) throw DimensionError("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.samples(); ++i) {
    const Vector x = data.X.row(static_cast<Eigen::Index>(i)).transpose();
    if (predict(x, state, noise) == data.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples());
}

double accuracy(const VIDataset& data, const VIState& state, std::size_t L, std::uint64_t seed) {
  if (L < 1) throw ConfigError("accuracy: L must be at least 1");
  Rng rng(seed);
  return accuracy(data, state, rng.normal_matrix(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(state.size())));
}

}  // namespace dualgeo
