#include <doctest.h>

#include "dualgeo/bradley_terry.hpp"
#include "dualgeo/categorical.hpp"
#include "dualgeo/checks.hpp"
#include "dualgeo/diag_gaussian.hpp"
#include "dualgeo/mixture.hpp"
#include "dualgeo/random.hpp"

#include <cmath>

using namespace dualgeo;

TEST_CASE("categorical coordinates") {
  const CategoricalModel model(2);
  const ThetaCoords zero = model.theta_from_eta(EtaCoords{1.0 / 3.0, 1.0 / 3.0});
  CHECK(zero.values().norm() < 1e-15);
  CHECK(model.psi(zero) == doctest::Approx(std::log(3.0)).epsilon(1e-15));

  const ThetaCoords th = model.theta_from_eta(EtaCoords{0.5, 0.3});
  CHECK(th[0] == doctest::Approx(std::log(2.5)).epsilon(1e-14));
  CHECK(th[1] == doctest::Approx(std::log(1.5)).epsilon(1e-14));

  const ThetaCoords far{5.0, -5.0};
  CHECK((model.theta_from_eta(model.eta_from_theta(far)).values() - far.values()).norm() < 1e-10);

  // Max-shift keeps huge natural parameters finite.
  const EtaCoords big = model.eta_from_theta(ThetaCoords{800.0, 0.0});
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(std::isfinite(model.psi(ThetaCoords{800.0, 0.0})));

  CHECK_THROWS_AS(model.theta_from_eta(EtaCoords{0.0, 0.5}), DomainError);
  CHECK_FALSE(model.eta_in_domain(EtaCoords{0.6, 0.4}));
  CHECK_THROWS_AS(CategoricalModel(0), ConfigError);
}

TEST_CASE("categorical negative log-likelihood") {
  const CategoricalModel model(2);
  Vector freqs(3);
  freqs << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  const auto nll = categorical_nll(model, freqs, 3.0);
  const Point uniform = Point::from_eta(model, EtaCoords{1.0 / 3.0, 1.0 / 3.0});
  CHECK(nll.value(uniform) == doctest::Approx(3.0 * std::log(3.0)).epsilon(1e-14));
  CHECK(objective_grad_theta(model, nll, uniform).norm() < 1e-14);

  freqs << 0.1, 0.6, 0.3;
  const auto f = categorical_nll(model, freqs, 50.0);
  const Point p = Point::from_eta(model, EtaCoords{0.25, 0.35});
  auto via_theta = [&](const Vector& th) { return f.value(Point::from_theta(model, ThetaCoords(th))); };
  auto via_eta = [&](const Vector& e) { return f.value(Point::from_eta(model, EtaCoords(e))); };
  CHECK(relative_error(fd_gradient_scaled(via_theta, p.theta().values()), objective_grad_theta(model, f, p)) < 1e-6);
  CHECK(relative_error(fd_gradient_scaled(via_eta, p.eta().values()), objective_grad_eta(model, f, p)) < 1e-6);

  Vector bad(3);
  bad << 0.5, 0.6, -0.1;
  CHECK_THROWS(categorical_nll(model, bad, 10.0));
}

TEST_CASE("mixture four-arc instance") {
  const MixtureModel model = MixtureModel::four_arc_instance();
  const EtaCoords center{0.25, 0.25, 0.25};
  CHECK(model.theta_from_eta(center).values().norm() < 1e-15);
  CHECK(model.density(center, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(model.density(center, 1) == doctest::Approx(1.0 / 12.0));
  const EtaCoords back = model.eta_from_theta(ThetaCoords{0.0, 0.0, 0.0});
  CHECK((back.values() - center.values()).norm() < 1e-12);

  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    Vector w(4);
    for (int k = 0; k < 4; ++k) w[k] = rng.uniform() + 0.02;
    w /= w.sum();
    const EtaCoords eta(Vector(w.head(3)));
    const ThetaCoords th = model.theta_from_eta(eta);
    CHECK((model.eta_from_theta(th).values() - eta.values()).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(model.metric_eta(eta)).eigenvalues().minCoeff() > 0.0);
    CHECK(metric_eta_error(model, eta) < 1e-4);
  }
  // The theta image is all of R^3, so far-out parameters still invert.
  const EtaCoords edge = model.eta_from_theta(ThetaCoords{6.0, -4.0, 2.0});
  CHECK(model.eta_in_domain(edge));
}

TEST_CASE("mixture construction and loading") {
  Matrix same(2, 3);
  same << 0.5, 0.5, 0.0, 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(MixtureModel{same}, ConfigError);
  Matrix unnormalized(2, 2);
  unnormalized << 0.5, 0.6, 1.0, 0.0;
  CHECK_THROWS_AS(MixtureModel{unnormalized}, ConfigError);

  const MixtureModel loaded = MixtureModel::from_json_file(std::string(DUALGEO_TEST_DATA) + "/four_arcs.json");
  CHECK(loaded.dim() == 3);
  CHECK(loaded.theta_image_is_full());
  CHECK((loaded.components() - MixtureModel::four_arc_instance().components()).norm() < 1e-15);
  CHECK_THROWS_AS(MixtureModel::from_json("{\"omega_size\": 2}"), ConfigError);
  CHECK_THROWS_AS(MixtureModel::from_json("not json"), ConfigError);
}

TEST_CASE("mixture negative log-likelihood") {
  const MixtureModel model = MixtureModel::four_arc_instance();
  const EtaCoords eta{0.2, 0.3, 0.1};
  const Vector freqs = model.density(eta);
  const auto at_model = mixture_nll(model, freqs, 1000.0);
  CHECK(objective_grad_eta(model, at_model, Point::from_eta(model, eta)).norm() < 1e-9);

  Vector on_one = Vector::Zero(8);
  on_one[1] = 1.0;
  const auto f = mixture_nll(model, on_one, 10.0);
  const Point p = Point::from_eta(model, EtaCoords{0.25, 0.25, 0.25});
  // Only component 0 covers x = 1: D_eta = -N (1/3 - 0) / p(1) e_0.
  const Vector g = objective_grad_eta(model, f, p);
  CHECK(g[0] == doctest::Approx(-10.0 * (1.0 / 3.0) / (1.0 / 12.0)));
  CHECK(g[1] == doctest::Approx(0.0));
  auto via_eta = [&](const Vector& e) { return f.value(Point::from_eta(model, EtaCoords(e))); };
  CHECK(relative_error(fd_gradient_scaled(via_eta, p.eta().values()), g) < 1e-6);
}

TEST_CASE("bradley-terry model") {
  const BTObservation x = BTObservation::three_player_example();
  const Vector T = x.sufficient_statistics();
  CHECK(T[0] == 15.0);
  CHECK(T[1] == 8.0);
  CHECK(T[2] == 7.0);

  const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
  const EtaCoords eta = model.eta_from_theta(ThetaCoords{0.0, 0.0});
  CHECK(eta[0] == doctest::Approx(10.0));
  CHECK(eta[1] == doctest::Approx(10.0));
  const Vector pi = bt_pi_from_theta(ThetaCoords{0.0, 0.0});
  CHECK((pi - Vector::Constant(3, 1.0 / 3.0)).norm() < 1e-15);

  const ThetaCoords th{0.4, -1.2};
  auto psi = [&](const Vector& t) { return model.psi(ThetaCoords(t)); };
  auto eta_map = [&](const Vector& t) { return model.eta_from_theta(ThetaCoords(t)).values(); };
  CHECK(relative_error(fd_gradient_scaled(psi, th.values()), model.eta_from_theta(th).values()) < 1e-6);
  CHECK(relative_error(fd_jacobian(eta_map, th.values()), model.metric_theta(th)) < 1e-6);
  CHECK((model.eta_from_theta(model.theta_from_eta(model.eta_from_theta(th))).values() - model.eta_from_theta(th).values()).norm() < 1e-9);

  // Wins below every expectation cannot be attained.
  CHECK_FALSE(model.eta_in_domain(EtaCoords{-1.0, 5.0}));
}

TEST_CASE("bradley-terry gradient in pi") {
  const BTObservation x = BTObservation::three_player_example();
  Vector pi(3);
  pi << 0.5, 0.2667, 0.2333;
  auto nll = [&](const Vector& head) {
    Vector full(3);
    full << head, 1.0 - head.sum();
    return bt_nll_pi(x, full);
  };
  CHECK(relative_error(fd_gradient_scaled(nll, pi.head(2)), bt_nll_grad_pi(x, pi)) < 1e-6);

  CountMatrix even(3, 3);
  even << 0, 4, 6, 4, 0, 2, 6, 2, 0;
  CHECK(bt_nll_grad_pi(BTObservation(even), Vector::Constant(3, 1.0 / 3.0)).norm() < 1e-12);
}

TEST_CASE("bradley-terry input validation") {
  const BTObservation csv = BTObservation::from_csv_file(std::string(DUALGEO_TEST_DATA) + "/three_players.csv");
  CHECK(csv.wins() == BTObservation::three_player_example().wins());
  CHECK_THROWS_AS(BTObservation::from_csv("i,j,x_ij,x_ji\n0,0,1,1\n"), ConfigError);
  CHECK_THROWS_AS(BTObservation::from_csv("i,j,x_ij,x_ji\n0,1,a,1\n"), ConfigError);

  CountMatrix asym(2, 2);
  asym << 0, 3, 2, 0;
  CountMatrix n(2, 2);
  n << 0, 3, 3, 0;
  CHECK_THROWS_AS(BradleyTerryModel{asym}, ConfigError);
  const BradleyTerryModel model(n);
  CHECK_THROWS_AS(model.check_observation(BTObservation(asym)), ConfigError);
}

TEST_CASE("diagonal gaussian coordinates") {
  Vector mu(1), sigma(1);
  mu << 0.0;
  sigma << 1.0;
  CHECK(dg_theta_from_musigma(mu, sigma).values() == Vector((Vector(2) << 0.0, -0.5).finished()));
  CHECK(dg_eta_from_musigma(mu, sigma).values() == Vector((Vector(2) << 0.0, 1.0).finished()));

  mu << 2.0;
  sigma << 0.5;
  const ThetaCoords th = dg_theta_from_musigma(mu, sigma);
  const EtaCoords eta = dg_eta_from_musigma(mu, sigma);
  CHECK(th[0] == doctest::Approx(8.0));
  CHECK(th[1] == doctest::Approx(-2.0));
  CHECK(eta[0] == doctest::Approx(2.0));
  CHECK(eta[1] == doctest::Approx(4.25));
  const MuSigma a = dg_musigma_from_theta(th);
  const MuSigma b = dg_musigma_from_eta(eta);
  CHECK(std::abs(a.mu[0] - 2.0) < 1e-12);
  CHECK(std::abs(a.sigma[0] - 0.5) < 1e-12);
  CHECK(std::abs(b.sigma[0] - 0.5) < 1e-12);

  CHECK_THROWS_AS(dg_musigma_from_theta(ThetaCoords{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(dg_musigma_from_eta(EtaCoords{2.0, 4.0}), DomainError);

  const DiagGaussianModel model(1);
  CHECK(metric_hessian_error(model, th) < 1e-6);
  CHECK(metric_eta_error(model, eta) < 1e-6);
  CHECK((model.metric_theta(th) * model.metric_eta(eta) - Matrix::Identity(2, 2)).norm() < 1e-10);
}
