#include "dualgeo/bradley_terry.hpp"

#include <fstream>
#include <sstream>

namespace dualgeo {

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(exp a + exp b) without overflow.
double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

Vector padded(const Vector& theta) {
  Vector full(theta.size() + 1);
  full.head(theta.size()) = theta;
  full[theta.size()] = 0.0;
  return full;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

BTObservation::BTObservation(CountMatrix wins) : wins_(std::move(wins)) {
  if (wins_.rows() != wins_.cols()) throw ConfigError("BTObservation: win table must be square");
  if (wins_.rows() < 2) throw ConfigError("BTObservation: need at least two players");
  if ((wins_.array() < 0).any()) throw ConfigError("BTObservation: negative win count");
  for (Eigen::Index i = 0; i < wins_.rows(); ++i) {
    if (wins_(i, i) != 0) throw ConfigError("BTObservation: a player cannot play itself");
  }
}

CountMatrix BTObservation::match_counts() const { return wins_ + wins_.transpose(); }

Vector BTObservation::sufficient_statistics() const {
  return wins_.rowwise().sum().cast<double>();
}

BTObservation BTObservation::three_player_example() {
  CountMatrix x(3, 3);
  x << 0, 7, 8,
       3, 0, 5,
       2, 5, 0;
  return BTObservation(x);
}

BTObservation BTObservation::from_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("bt csv: missing header");
  struct Row {
    long i, j, xij, xji;
  };
  std::vector<Row> rows;
  long players = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw ConfigError("bt csv: line " + std::to_string(line_no) + " needs 4 fields");
    Row r{};
    try {
      r = Row{std::stol(cells[0]), std::stol(cells[1]), std::stol(cells[2]), std::stol(cells[3])};
    } catch (const std::exception&) {
      throw ConfigError("bt csv: line " + std::to_string(line_no) + " is not numeric");
    }
    if (r.i < 0 || r.j < 0 || r.i == r.j || r.xij < 0 || r.xji < 0) {
      throw ConfigError("bt csv: line " + std::to_string(line_no) + " has invalid values");
    }
    players = std::max({players, r.i + 1, r.j + 1});
    rows.push_back(r);
  }
  CountMatrix x = CountMatrix::Zero(players, players);
  for (const Row& r : rows) {
    x(r.i, r.j) += r.xij;
    x(r.j, r.i) += r.xji;
  }
  return BTObservation(x);
}

BTObservation BTObservation::from_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_csv(buffer.str());
}

BradleyTerryModel::BradleyTerryModel(CountMatrix match_counts) : n_(std::move(match_counts)) {
  if (n_.rows() != n_.cols() || n_.rows() < 2) throw ConfigError("BradleyTerryModel: need a square table with N >= 2");
  if ((n_.array() < 0).any()) throw ConfigError("BradleyTerryModel: negative match count");
  if (n_ != n_.transpose()) throw ConfigError("BradleyTerryModel: match counts must be symmetric");
  for (Eigen::Index i = 0; i < n_.rows(); ++i) {
    if (n_(i, i) != 0) throw ConfigError("BradleyTerryModel: n_ii must be zero");
  }
}

BradleyTerryModel BradleyTerryModel::for_observation(const BTObservation& x) {
  return BradleyTerryModel(x.match_counts());
}

void BradleyTerryModel::check_observation(const BTObservation& x) const {
  if (x.players() != players() || x.match_counts() != n_) {
    throw ConfigError("BTObservation does not match the model's match counts");
  }
}

double BradleyTerryModel::psi(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "BradleyTerryModel::psi");
  const Vector t = padded(theta.values());
  double total = 0.0;
  const Eigen::Index big_n = n_.rows();
  for (Eigen::Index i = 0; i < big_n; ++i) {
    for (Eigen::Index j = i + 1; j < big_n; ++j) {
      if (n_(i, j) != 0) total += static_cast<double>(n_(i, j)) * log_add_exp(t[i], t[j]);
    }
  }
  return total;
}

EtaCoords BradleyTerryModel::eta_from_theta(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "BradleyTerryModel::eta_from_theta");
  const Vector t = padded(theta.values());
  const Eigen::Index m = static_cast<Eigen::Index>(dim());
  Vector eta = Vector::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n_.rows(); ++j) {
      if (j != i && n_(i, j) != 0) eta[i] += static_cast<double>(n_(i, j)) * logistic(t[i] - t[j]);
    }
  }
  return EtaCoords(eta);
}

Matrix BradleyTerryModel::metric_theta(const ThetaCoords& theta) const {
  require_dim(dim(), theta.values().size(), "BradleyTerryModel::metric_theta");
  const Vector t = padded(theta.values());
  const Eigen::Index m = static_cast<Eigen::Index>(dim());
  Matrix g = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n_.rows(); ++j) {
      if (j == i || n_(i, j) == 0) continue;
      const double s = logistic(t[i] - t[j]);
      const double w = static_cast<double>(n_(i, j)) * s * (1.0 - s);
      g(i, i) += w;
      if (j < m) g(i, j) -= w;
    }
  }
  return g;
}

bool BradleyTerryModel::theta_in_domain(const ThetaCoords& theta) const {
  return theta.values().size() == static_cast<Eigen::Index>(dim()) && theta.values().allFinite();
}

ThetaCoords BradleyTerryModel::theta_from_eta(const EtaCoords& eta) const {
  require_dim(dim(), eta.values().size(), "BradleyTerryModel::theta_from_eta");
  const Vector& target = eta.values();
  auto merit = [&](const Vector& th) { return psi(ThetaCoords(th)) - th.dot(target); };

  const double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
  Vector theta = Vector::Zero(static_cast<Eigen::Index>(dim()));
  double value = merit(theta);
  Vector residual = eta_from_theta(ThetaCoords(theta)).values() - target;
  for (int iter = 0; iter < 200; ++iter) {
    const double norm = residual.lpNorm<Eigen::Infinity>();
    if (norm < 1e-13 * scale) return ThetaCoords(theta);
    Eigen::LLT<Matrix> llt(metric_theta(ThetaCoords(theta)));
    if (llt.info() != Eigen::Success) break;
    const Vector direction = llt.solve(residual);
    const double slope = residual.dot(direction);
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const Vector trial = theta - step * direction;
      if (!trial.allFinite()) continue;
      const double trial_value = merit(trial);
      const Vector trial_residual = eta_from_theta(ThetaCoords(trial)).values() - target;
      // Near the root the merit only changes by rounding; a smaller residual
      // is then the better acceptance test.
      if (trial_value <= value - 1e-4 * step * slope || trial_residual.lpNorm<Eigen::Infinity>() < norm) {
        theta = trial;
        value = trial_value;
        residual = trial_residual;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (norm < 1e-10 * scale) return ThetaCoords(theta);
      break;
    }
  }
  throw ConvergenceError("BradleyTerryModel::theta_from_eta: eta is not attainable or Newton failed");
}

bool BradleyTerryModel::eta_in_domain(const EtaCoords& eta) const {
  if (eta.values().size() != static_cast<Eigen::Index>(dim())) return false;
  try {
    (void)theta_from_eta(eta);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Vector bt_pi_from_theta(const ThetaCoords& theta) {
  const Vector t = padded(theta.values());
  const Vector w = (t.array() - t.maxCoeff()).exp();
  return w / w.sum();
}

ThetaCoords bt_theta_from_pi(const Vector& pi) {
  if (pi.size() < 2 || (pi.array() <= 0.0).any()) throw DomainError("bt_theta_from_pi: strengths must be positive");
  const Eigen::Index m = pi.size() - 1;
  return ThetaCoords(Vector((pi.head(m).array() / pi[m]).log()));
}

DualGradientObjective bt_nll(const BradleyTerryModel& model, const BTObservation& x) {
  model.check_observation(x);
  const Vector stats = x.sufficient_statistics().head(static_cast<Eigen::Index>(model.dim()));
  DualGradientObjective f;
  f.value = [&model, stats](const Point& p) { return model.psi(p.theta()) - p.theta().values().dot(stats); };
  f.grad_theta = [stats](const Point& p) -> Vector { return p.eta().values() - stats; };
  return f;
}

double bt_nll_pi(const BTObservation& x, const Vector& pi) {
  require_dim(x.players(), pi.size(), "bt_nll_pi");
  const CountMatrix& w = x.wins();
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.rows(); ++j) {
      const double n = static_cast<double>(w(i, j) + w(j, i));
      if (n == 0.0) continue;
      total -= static_cast<double>(w(i, j)) * std::log(pi[i]) + static_cast<double>(w(j, i)) * std::log(pi[j]) -
               n * std::log(pi[i] + pi[j]);
    }
  }
  return total;
}

Vector bt_nll_euclidean_grad(const BTObservation& x, const Vector& pi) {
  require_dim(x.players(), pi.size(), "bt_nll_euclidean_grad");
  const CountMatrix& w = x.wins();
  const Vector stats = x.sufficient_statistics();
  Vector g(pi.size());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double pair_term = 0.0;
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      if (j == i) continue;
      const double n = static_cast<double>(w(i, j) + w(j, i));
      if (n != 0.0) pair_term += n / (pi[i] + pi[j]);
    }
    g[i] = -stats[i] / pi[i] + pair_term;
  }
  return g;
}

Vector bt_nll_grad_pi(const BTObservation& x, const Vector& pi) {
  const Vector full = bt_nll_euclidean_grad(x, pi);
  const Eigen::Index m = pi.size() - 1;
  return full.head(m).array() - full[m];
}

}  // namespace dualgeo
