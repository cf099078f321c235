#pragma once

#include "dualgeo/diag_gaussian.hpp"
#include "dualgeo/random.hpp"

#include <cstdint>
#include <string>

namespace dualgeo {

/// Design matrix X (N x M) and one-hot responses Y (N x D).
struct VIDataset {
  Matrix X;
  Matrix Y;

  std::size_t samples() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(X.cols()); }
  std::size_t classes() const { return static_cast<std::size_t>(Y.cols()); }

  void validate() const;
  /// Rows [begin, end).
  VIDataset rows(std::size_t begin, std::size_t end) const;
  /// Class index of row i.
  std::size_t label(std::size_t i) const;

  /// CSV with a header; feature columns first, then `classes` one-hot columns.
  static VIDataset from_csv(const std::string& text, std::size_t classes);
  std::string to_csv() const;
};

/// Mean-field Gaussian over vec(W), W being M x D stored row-major
/// (index i * D + j). sigma = softplus(rho).
class VIState {
 public:
  static VIState from_mu_rho(Vector mu, Vector rho);
  static VIState from_mu_sigma(Vector mu, Vector sigma);

  const Vector& mu() const { return mu_; }
  const Vector& sigma() const { return sigma_; }
  const Vector& rho() const { return rho_; }
  std::size_t size() const { return static_cast<std::size_t>(mu_.size()); }

 private:
  VIState(Vector mu, Vector sigma, Vector rho) : mu_(std::move(mu)), sigma_(std::move(sigma)), rho_(std::move(rho)) {}
  Vector mu_;
  Vector sigma_;
  Vector rho_;
};

double softplus(double x);
/// Inverse of softplus for positive arguments.
double softplus_inverse(double y);
double logistic(double x);

struct MCConfig {
  std::size_t K = 1000;
  std::size_t L = 10;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  /// Reuse the same K draws for every evaluation inside one update.
  bool common_noise = true;

  void validate() const;
};

/// Max-shifted softmax.
Vector softmax(const Vector& a);
/// sum_k y_k log s_k.
double cat_logpdf(const Vector& y, const Vector& s);

/// (1/K) sum_k [log q(W_k) - log p(Y | X, W_k) - log p(W_k)] with
/// vec(W_k) = mu + sigma * eps_k; `noise` is K x MD.
double mc_objective(const VIDataset& data, const Vector& mu, const Vector& sigma, double lambda, const Matrix& noise);
double mc_objective(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise);

struct MuSigmaGradient {
  Vector d_mu;
  Vector d_sigma;
};

/// Reparameterized gradient of mc_objective for fixed noise.
MuSigmaGradient mc_grad_musigma(const VIDataset& data, const Vector& mu, const Vector& sigma, double lambda,
                                const Matrix& noise);
MuSigmaGradient mc_grad_musigma(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise);

/// d/d rho through sigma'(rho) = logistic(rho).
Vector mc_grad_rho(const VIState& state, const MuSigmaGradient& g);

struct DualGradient {
  Vector d_theta;
  Vector d_eta;
};

/// Gradients of mc_objective in the diagonal-Gaussian theta and eta charts,
/// ordered (mean block, scale block).
DualGradient musigma_to_dual(const Vector& mu, const Vector& sigma, const MuSigmaGradient& g);
DualGradient mc_grad_dual(const VIDataset& data, const VIState& state, const MCConfig& cfg, const Matrix& noise);

enum class VIMethod { gradient, e_geodesic, m_geodesic };
std::string to_string(VIMethod m);

struct VIStepResult {
  VIState state;
  double step_size;
  int halvings;
};

/// One update from `init`. The geodesic methods halve lr until the proposal
/// lies in the theta (e) or eta (m) domain; `gradient` is a plain step on
/// (mu, rho).
VIStepResult vi_single_iteration(const VIDataset& data, const VIState& init, VIMethod method, double lr,
                                 const MCConfig& cfg, const Matrix& noise, int max_halvings = 60);
/// Draws the K x MD noise from cfg.seed.
VIStepResult vi_single_iteration(const VIDataset& data, const VIState& init, VIMethod method, double lr,
                                 const MCConfig& cfg);

/// Class index maximizing the average softmax over the posterior draws in
/// `noise` (L x MD); ties go to the lowest index.
std::size_t predict(const Vector& x, const VIState& state, const Matrix& noise);
/// Fraction of rows whose predicted class equals the one-hot label, using L
/// draws shared by all rows.
double accuracy(const VIDataset& data, const VIState& state, std::size_t L, std::uint64_t seed);
double accuracy(const VIDataset& data, const VIState& state, const Matrix& noise);

}  // namespace dualgeo
