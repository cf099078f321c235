#include <doctest.h>

#include "dualgeo/categorical.hpp"
#include "dualgeo/diag_gaussian.hpp"
#include "dualgeo/optimizers.hpp"

#include <cmath>

using namespace dualgeo;

namespace {

DescentConfig to_target(Connection c, const Point& q) {
  DescentConfig cfg;
  cfg.connection = c;
  cfg.stop.kind = StopKind::distance_to_target_eta;
  cfg.stop.target_eta = q.eta().values();
  return cfg;
}

}  // namespace

TEST_CASE("one-step convergence for matched connections") {
  const CategoricalModel model(2);
  const Point start = Point::from_eta(model, EtaCoords{1.0 / 3.0, 1.0 / 3.0});
  const Point q = Point::from_eta(model, EtaCoords{0.5, 0.3});

  const RunTrace m = run_geodesic_descent(model, divergence_to(model, q), start, to_target(Connection::m_geodesic, q));
  CHECK(m.outcome == Outcome::converged);
  CHECK(m.iterations == 1);
  CHECK((m.last() - q.eta().values()).norm() < 1e-15);

  const RunTrace e = run_geodesic_descent(model, divergence_from(model, q), start, to_target(Connection::e_geodesic, q));
  CHECK(e.iterations == 1);
  CHECK((e.last() - q.theta().values()).norm() < 1e-14);

  // Mismatched pairings take several steps.
  const RunTrace slow = run_geodesic_descent(model, divergence_to(model, q), start, to_target(Connection::e_geodesic, q));
  CHECK(slow.outcome == Outcome::converged);
  CHECK(slow.iterations > 1);
}

TEST_CASE("categorical MLE in one m-step with t = 1/N") {
  const CategoricalModel model(3);
  Vector counts(4);
  counts << 12, 30, 7, 51;
  const double N = counts.sum();
  const auto nll = categorical_nll(model, counts / N, N);
  DescentConfig cfg;
  cfg.connection = Connection::m_geodesic;
  cfg.step_size = 1.0 / N;
  cfg.stop.kind = StopKind::grad_norm_eta;
  cfg.stop.epsilon = 1e-8;
  const RunTrace tr = run_geodesic_descent(model, nll, Point::from_eta(model, EtaCoords{0.1, 0.2, 0.3}), cfg);
  CHECK(tr.iterations == 1);
  CHECK((tr.last() - (counts / N).head(3)).norm() < 1e-15);
}

TEST_CASE("step halving records t0 / 2^h") {
  const CategoricalModel model(2);
  const Point start = Point::from_eta(model, EtaCoords{0.1, 0.1});
  const Point q = Point::from_eta(model, EtaCoords{0.6, 0.3});
  DescentConfig cfg = to_target(Connection::m_geodesic, q);
  cfg.step_size = 4.0;
  const RunTrace tr = run_geodesic_descent(model, divergence_to(model, q), start, cfg);
  CHECK(tr.outcome == Outcome::converged);
  REQUIRE(!tr.step_sizes_used.empty());
  CHECK(tr.step_sizes_used.front() < 4.0);
  for (double t : tr.step_sizes_used) {
    const double h = std::log2(4.0 / t);
    CHECK(h == doctest::Approx(std::round(h)));
  }
  CHECK(tr.total_halvings(4.0) > 0);
  CHECK(tr.iterates.size() == static_cast<std::size_t>(tr.iterations) + 1);
}

TEST_CASE("descent outcomes") {
  const CategoricalModel model(2);
  const Point start = Point::from_eta(model, EtaCoords{1.0 / 3.0, 1.0 / 3.0});
  const Point q = Point::from_eta(model, EtaCoords{0.5, 0.3});
  DescentConfig cfg = to_target(Connection::e_geodesic, q);
  cfg.max_iters = 1;
  CHECK(run_geodesic_descent(model, divergence_to(model, q), start, cfg).outcome == Outcome::max_iters);

  const DiagGaussianModel gauss(1);
  DualGradientObjective steep;
  steep.value = [](const Point&) { return 0.0; };
  steep.grad_theta = [](const Point&) { return Vector((Vector(2) << 0.0, 1e6).finished()); };
  DescentConfig sc;
  sc.connection = Connection::m_geodesic;
  sc.max_halvings = 3;
  const RunTrace tr = run_geodesic_descent(gauss, steep, Point::from_eta(gauss, EtaCoords{0.0, 1.0}), sc);
  CHECK(tr.outcome == Outcome::step_underflow);
  CHECK(tr.iterations == 0);

  DualGradientObjective broken;
  broken.value = [](const Point&) { return 0.0; };
  broken.grad_theta = [](const Point&) { return Vector::Constant(2, NAN); };
  CHECK_THROWS_AS(run_geodesic_descent(gauss, broken, Point::from_eta(gauss, EtaCoords{0.0, 1.0}), sc), NumericalError);

  DescentConfig bad;
  bad.step_size = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.step_size = 1.0;
  bad.max_halvings = 61;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("exponentiated gradient step") {
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  CHECK((exponentiated_gradient_step(third, Vector::Zero(3), 1.0).r - third).norm() < 1e-15);

  const SimplexStep s = exponentiated_gradient_step(third, Vector::Unit(3, 0), 1.0);
  CHECK_FALSE(s.overflow);
  CHECK(s.r[0] == doctest::Approx(0.155362).epsilon(1e-5));
  CHECK(s.r[1] == doctest::Approx(0.422319).epsilon(1e-5));
  CHECK(s.r[2] == doctest::Approx(0.422319).epsilon(1e-5));

  CHECK(exponentiated_gradient_step(third, Vector::Constant(3, -1000.0).cwiseProduct(Vector::Unit(3, 1)), 1.0).overflow);
}

TEST_CASE("exponentiated gradient matches the categorical e-geodesic") {
  const CategoricalModel model(2);
  Vector freqs(3);
  freqs << 0.2, 0.5, 0.3;
  const double N = 40.0;
  const double t = 0.5 / N;
  const auto nll = categorical_nll(model, freqs, N);
  Vector r = Vector::Constant(3, 1.0 / 3.0);
  Point p = Point::from_eta(model, EtaCoords(Vector(r.head(2))));
  for (int k = 0; k < 10; ++k) {
    r = exponentiated_gradient_step(r, Vector(-N * freqs.cwiseQuotient(r)), t).r;
    p = Point::from_theta(model, e_geodesic_step(model, p.theta(), objective_grad_eta(model, nll, p), t));
    CHECK((p.eta().values() - r.head(2)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("MM step") {
  const BTObservation x = BTObservation::three_player_example();
  const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
  const Vector next = bt_mm_step(model, x, Vector::Constant(3, 1.0 / 3.0));
  CHECK(next[0] == doctest::Approx(0.5));
  CHECK(next[1] == doctest::Approx(8.0 / 30.0));
  CHECK(next[2] == doctest::Approx(7.0 / 30.0));

  CountMatrix even(3, 3);
  even << 0, 4, 6, 4, 0, 2, 6, 2, 0;
  const BTObservation sym(even);
  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  CHECK((bt_mm_step(BradleyTerryModel::for_observation(sym), sym, uniform) - uniform).norm() < 1e-15);

  CountMatrix shutout(2, 2);
  shutout << 0, 5, 0, 0;
  const BTObservation lost(shutout);
  CHECK_THROWS_AS(bt_mm_step(BradleyTerryModel::for_observation(lost), lost, Vector::Constant(2, 0.5)), DomainError);

  const RunTrace mm = run_mm(model, x, uniform, 1e-10, 1000);
  CHECK(mm.outcome == Outcome::converged);
  CHECK(bt_nll_grad_pi(x, mm.last()).norm() < 1e-8);
}

TEST_CASE("small Bradley-Terry reference runs") {
  const BTObservation x = BTObservation::three_player_example();
  const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  CHECK(run_mm(model, x, uniform, 1e-5, 100000).iterations == 20);

  auto euclid = [&](const Vector& pi) { return bt_nll_euclidean_grad(x, pi); };
  auto monitor = [&](const Vector& pi) { return bt_nll_grad_pi(x, pi); };
  const RunTrace slow = run_exponentiated_gradient(uniform, euclid, monitor, SimplexRunConfig{0.01, 1e-5, 100000});
  CHECK(slow.outcome == Outcome::converged);
  CHECK(slow.iterations == 84);
  const RunTrace blown = run_exponentiated_gradient(uniform, euclid, monitor, SimplexRunConfig{1.0, 1e-5, 100000});
  CHECK(blown.outcome == Outcome::overflow);

  DescentConfig cfg;
  cfg.connection = Connection::e_geodesic;
  cfg.stop.kind = StopKind::grad_norm_pi;
  cfg.stop.monitored_gradient = [&](const Point& p) { return bt_nll_grad_pi(x, bt_pi_from_theta(p.theta())); };
  const Point start = Point::from_theta(model, ThetaCoords{0.0, 0.0});
  CHECK(run_geodesic_descent(model, bt_nll(model, x), start, cfg).iterations == 4);
  cfg.step_size = 0.01;
  CHECK(run_geodesic_descent(model, bt_nll(model, x), start, cfg).iterations == 1468);
}

TEST_CASE("euclidean gradient descent") {
  auto fn = [](const Vector& v) { return 0.5 * v.squaredNorm(); };
  auto grad = [](const Vector& v) { return v; };
  const RunTrace tr = run_euclidean_gd(fn, grad, Vector::Constant(2, 1.0), 0.5, 3);
  CHECK(tr.iterations == 3);
  CHECK(tr.last()[0] == doctest::Approx(0.125));
  CHECK(tr.values.size() == 4);
}
