#include <doctest.h>

#include "dualgeo/datagen.hpp"
#include "dualgeo/varinf.hpp"

#include <cmath>

using namespace dualgeo;

namespace {

constexpr double kHalfLog2Pi = 0.918938533204672742;

VIDataset small_data(std::uint64_t seed) { return generate(GenConfig{24, 2, 3, 0.0, 1.5, seed}); }

}  // namespace

TEST_CASE("softmax and categorical log-density") {
  const Vector s = softmax(Vector::Zero(2));
  CHECK(s[0] == doctest::Approx(0.5));
  Vector big(2);
  big << 1000.0, 0.0;
  const Vector t = softmax(big);
  CHECK(t.allFinite());
  CHECK(t[0] == doctest::Approx(1.0));
  CHECK(cat_logpdf(Vector::Unit(2, 0), s) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("softplus parameterization") {
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(softplus(800.0) == doctest::Approx(800.0));
  for (double s : {1e-8, 0.3, 1.0, 25.0, 300.0}) CHECK(softplus(softplus_inverse(s)) == doctest::Approx(s).epsilon(1e-12));
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(softplus_inverse(0.0), DomainError);

  const VIState st = VIState::from_mu_rho(Vector::Zero(3), Vector::Constant(3, -1.0));
  CHECK((st.sigma().array() - softplus(-1.0)).abs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(VIState::from_mu_sigma(Vector::Zero(2), Vector::Constant(2, -1.0)), DomainError);
  CHECK_THROWS_AS(VIState::from_mu_rho(Vector::Zero(2), Vector::Zero(3)), DimensionError);
}

TEST_CASE("Monte-Carlo objective closed-form values") {
  const VIDataset empty{Matrix(0, 1), Matrix(0, 2)};
  const Matrix zero = Matrix::Zero(1, 2);
  CHECK(mc_objective(empty, Vector::Zero(2), Vector::Ones(2), 1.0, zero) == doctest::Approx(0.0).epsilon(1e-15));

  // -log p(W) at W = 0 for one scalar with lambda = 1, isolated by removing log q's W-dependence.
  const VIDataset one{Matrix(0, 1), Matrix(0, 1)};
  const double with_sigma = mc_objective(one, Vector::Zero(1), Vector::Ones(1), 1.0, Matrix::Zero(1, 1));
  const double log_q = -kHalfLog2Pi;
  CHECK(with_sigma - log_q == doctest::Approx(kHalfLog2Pi));

  const Matrix wrong = Matrix::Zero(1, 3);
  CHECK_THROWS_AS(mc_objective(empty, Vector::Zero(2), Vector::Ones(2), 1.0, wrong), DimensionError);
}

TEST_CASE("Monte-Carlo gradients") {
  const VIDataset empty{Matrix(0, 1), Matrix(0, 2)};
  const MuSigmaGradient g0 = mc_grad_musigma(empty, Vector::Zero(2), Vector::Ones(2), 1.0, Matrix::Zero(1, 2));
  CHECK(g0.d_mu.norm() == 0.0);

  const VIDataset data = small_data(5);
  Rng rng(17);
  const Matrix noise = rng.normal_matrix(40, 6);
  const Vector mu = rng.normal_vector(6);
  const VIState state = VIState::from_mu_rho(mu, rng.normal_vector(6));
  const MuSigmaGradient g = mc_grad_musigma(data, state.mu(), state.sigma(), 2.0, noise);
  auto by_mu = [&](const Vector& m) { return mc_objective(data, m, state.sigma(), 2.0, noise); };
  auto by_sigma = [&](const Vector& s) { return mc_objective(data, state.mu(), s, 2.0, noise); };
  CHECK(relative_error(fd_gradient_scaled(by_mu, state.mu()), g.d_mu) < 1e-6);
  CHECK(relative_error(fd_gradient_scaled(by_sigma, state.sigma()), g.d_sigma) < 1e-6);
}

TEST_CASE("dual-chart gradients") {
  const VIDataset data = small_data(8);
  Rng rng(2);
  const Matrix noise = rng.normal_matrix(30, 6);
  auto check_at = [&](double m, double s) {
    const Vector mu = Vector::Constant(6, m);
    const Vector sigma = Vector::Constant(6, s);
    const DualGradient d = musigma_to_dual(mu, sigma, mc_grad_musigma(data, mu, sigma, 1.0, noise));
    auto via_theta = [&](const Vector& th) {
      const MuSigma ms = dg_musigma_from_theta(ThetaCoords(th));
      return mc_objective(data, ms.mu, ms.sigma, 1.0, noise);
    };
    auto via_eta = [&](const Vector& et) {
      const MuSigma ms = dg_musigma_from_eta(EtaCoords(et));
      return mc_objective(data, ms.mu, ms.sigma, 1.0, noise);
    };
    CHECK(relative_error(fd_gradient_scaled(via_theta, dg_theta_from_musigma(mu, sigma).values()), d.d_theta) < 1e-3);
    CHECK(relative_error(fd_gradient_scaled(via_eta, dg_eta_from_musigma(mu, sigma).values()), d.d_eta) < 1e-3);
    const DiagGaussianModel model(6);
    CHECK(relative_error(model.metric_theta(dg_theta_from_musigma(mu, sigma)) * d.d_eta, d.d_theta) < 1e-8);
  };
  check_at(0.0, 1.0);
  check_at(0.3, 0.7);
}

TEST_CASE("single VI iteration") {
  const VIDataset data = small_data(3);
  Rng rng(4);
  const VIState init = VIState::from_mu_rho(rng.normal_vector(6), rng.normal_vector(6));
  MCConfig cfg;
  cfg.K = 50;
  const Matrix noise = rng.normal_matrix(50, 6);
  for (VIMethod m : {VIMethod::gradient, VIMethod::e_geodesic, VIMethod::m_geodesic}) {
    const VIStepResult r = vi_single_iteration(data, init, m, 0.0, cfg, noise);
    CHECK((r.state.mu() - init.mu()).norm() < 1e-12);
    CHECK((r.state.sigma() - init.sigma()).norm() < 1e-12);
  }

  const VIStepResult e = vi_single_iteration(data, init, VIMethod::e_geodesic, 1e6, cfg, noise);
  CHECK(e.halvings > 0);
  CHECK((e.state.sigma().array() > 0.0).all());
  CHECK(e.step_size == doctest::Approx(1e6 / std::pow(2.0, e.halvings)));

  const VIStepResult eg = vi_single_iteration(data, init, VIMethod::e_geodesic, 1.0, cfg, noise);
  const VIStepResult mg = vi_single_iteration(data, init, VIMethod::m_geodesic, 1.0, cfg, noise);
  CHECK(mg.halvings > eg.halvings);

  CHECK_THROWS_AS(vi_single_iteration(data, init, VIMethod::m_geodesic, 1.0, cfg, noise, 0), ConvergenceError);
  CHECK_THROWS_AS(vi_single_iteration(data, init, VIMethod::gradient, -1.0, cfg, noise), ConfigError);

  // Seeded overload draws K x MD noise from cfg.seed.
  const VIStepResult a = vi_single_iteration(data, init, VIMethod::e_geodesic, 1.0, cfg);
  const VIStepResult b = vi_single_iteration(data, init, VIMethod::e_geodesic, 1.0, cfg);
  CHECK(a.state.mu() == b.state.mu());
}

TEST_CASE("prediction and accuracy") {
  Vector mu(4);
  mu << 2.0, -1.0, 0.0, 0.5;  // W = [[2, -1], [0, 0.5]]
  const VIState sharp = VIState::from_mu_sigma(mu, Vector::Constant(4, 1e-12));
  Vector x(2);
  x << 1.0, 1.0;
  const Matrix noise = Matrix::Zero(1, 4);
  CHECK(predict(x, sharp, noise) == 0);  // W^T x = (2, -0.5)

  const VIState flat = VIState::from_mu_sigma(Vector::Zero(4), Vector::Ones(4));
  CHECK(predict(x, flat, noise) == 0);

  Rng rng(9);
  const Matrix draws = rng.normal_matrix(1, 4);
  CHECK(predict(x, flat, draws) == predict(x, flat, draws));

  const VIDataset data = small_data(21);
  const VIState any = VIState::from_mu_rho(Vector::Zero(6), Vector::Zero(6));
  const double acc = accuracy(data, any, 10, 1);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
}

TEST_CASE("dataset CSV round trip and validation") {
  const VIDataset data = small_data(12);
  const VIDataset back = VIDataset::from_csv(data.to_csv(), 3);
  CHECK(back.X == data.X);
  CHECK(back.Y == data.Y);
  CHECK(back.rows(2, 5).samples() == 3);
  CHECK_THROWS_AS(VIDataset::from_csv("x0,y0,y1\n1.0,1,1\n", 2), DomainError);
  CHECK_THROWS_AS(VIDataset::from_csv("x0,y0,y1\n1.0,1\n", 2), ConfigError);
  CHECK_THROWS_AS(data.rows(5, 2), DimensionError);
}
