#include <doctest.h>

#include "dualgeo/categorical.hpp"
#include "dualgeo/geometry.hpp"
#include "dualgeo/random.hpp"

#include <cmath>

using namespace dualgeo;

namespace {

const CategoricalModel cat3(2);

Point uniform3() { return Point::from_eta(cat3, EtaCoords{1.0 / 3.0, 1.0 / 3.0}); }
Point q_point() { return Point::from_eta(cat3, EtaCoords{0.5, 0.3}); }

}  // namespace

TEST_CASE("coordinate tuples reject non-finite values") {
  CHECK_THROWS_AS(ThetaCoords({0.0, std::nan("")}), NumericalError);
  CHECK_THROWS_AS(EtaCoords(Vector::Constant(2, INFINITY)), NumericalError);
  CHECK(ThetaCoords{1.0, 2.0}.size() == 2);
}

TEST_CASE("points check dimension and domain") {
  CHECK_THROWS_AS(Point::from_eta(cat3, EtaCoords{0.2, 0.3, 0.1}), DimensionError);
  CHECK_THROWS_AS(Point::from_eta(cat3, EtaCoords{0.7, 0.3}), DomainError);
  const Point p = Point::from_theta(cat3, ThetaCoords{0.0, 0.0});
  CHECK(p.native() == Point::Chart::theta);
  CHECK(p.eta()[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("e_geodesic_step is affine in theta") {
  const ThetaCoords zero{0.0, 0.0};
  CHECK(e_geodesic_step(cat3, zero, Vector::Constant(2, 1.0), 0.0).values() == Vector::Zero(2));
  Vector g(2);
  g << 0.2, -0.1;
  const ThetaCoords th = e_geodesic_step(cat3, zero, g, 1.0);
  CHECK(th[0] == doctest::Approx(-0.2));
  CHECK(th[1] == doctest::Approx(0.1));
  CHECK_THROWS_AS(e_geodesic_step(cat3, zero, Vector::Zero(3), 1.0), DimensionError);
  CHECK_THROWS_AS(e_geodesic_step(cat3, zero, Vector::Constant(2, NAN), 1.0), NumericalError);
}

TEST_CASE("e-step on h = B(q, .) lands on theta(q)") {
  const Point p = uniform3();
  const auto h = divergence_from(cat3, q_point());
  const ThetaCoords th = e_geodesic_step(cat3, p.theta(), objective_grad_eta(cat3, h, p), 1.0);
  CHECK(th[0] == doctest::Approx(0.916290731874155).epsilon(1e-12));
  CHECK(th[1] == doctest::Approx(0.405465108108164).epsilon(1e-12));
}

TEST_CASE("m_geodesic_step") {
  const EtaCoords third{1.0 / 3.0, 1.0 / 3.0};
  CHECK(m_geodesic_step(cat3, third, Vector::Zero(2), 1.0).values() == third.values());

  const Point p = uniform3();
  const auto f = divergence_to(cat3, q_point());
  const Vector g = objective_grad_theta(cat3, f, p);
  CHECK(g[0] == doctest::Approx(-1.0 / 6.0));
  CHECK(g[1] == doctest::Approx(1.0 / 30.0));
  const EtaCoords eta = m_geodesic_step(cat3, p.eta(), g, 1.0);
  CHECK(eta[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(eta[1] == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("bregman divergence matches the KL sum") {
  const Point r = uniform3();
  const Point q = q_point();
  CHECK(bregman_divergence(cat3, r, r) == doctest::Approx(0.0).epsilon(1e-15));
  // sum q log(3 q)
  const double kl = 0.5 * std::log(1.5) + 0.3 * std::log(0.9) + 0.2 * std::log(0.6);
  CHECK(kl == doctest::Approx(0.068959).epsilon(1e-5));
  CHECK(bregman_divergence(cat3, r, q) == doctest::Approx(kl).epsilon(1e-14));
  Vector qv(3), rv(3);
  qv << 0.5, 0.3, 0.2;
  rv << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  CHECK(kl_divergence(qv, rv) == doctest::Approx(kl).epsilon(1e-14));
}

TEST_CASE("dual potential is the negative entropy") {
  CHECK(dual_potential(cat3, EtaCoords{1.0 / 3.0, 1.0 / 3.0}) == doctest::Approx(-std::log(3.0)).epsilon(1e-14));
  CHECK(dual_potential(cat3, EtaCoords{0.5, 0.3}) == doctest::Approx(-1.0296530140645737).epsilon(1e-12));
  CHECK_THROWS_AS(dual_potential(cat3, EtaCoords{0.9, 0.3}), DomainError);

  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    Vector p(3);
    for (int k = 0; k < 3; ++k) p[k] = rng.uniform() + 0.1;
    p /= p.sum();
    const Vector eta = p.head(2);
    auto phi = [](const Vector& e) { return dual_potential(cat3, EtaCoords(e)); };
    CHECK(relative_error(fd_gradient_scaled(phi, eta), cat3.theta_from_eta(EtaCoords(eta)).values()) < 1e-4);
  }
}

TEST_CASE("mirror_descent_step_numeric") {
  const ThetaCoords th{0.3, -0.7};
  CHECK((mirror_descent_step_numeric(cat3, th, Vector::Zero(2), 0.5).values() - th.values()).norm() < 1e-12);

  Vector g(2);
  g << 0.1, -0.2;
  const ThetaCoords zero{0.0, 0.0};
  const ThetaCoords numeric = mirror_descent_step_numeric(cat3, zero, g, 0.5);
  const EtaCoords eta = m_geodesic_step(cat3, cat3.eta_from_theta(zero), g, 0.5);
  CHECK((numeric.values() - cat3.theta_from_eta(eta).values()).lpNorm<Eigen::Infinity>() < 1e-8);

  // t = 1 on f = B(., q): the argmin is theta(q).
  const Point p = uniform3();
  const auto f = divergence_to(cat3, q_point());
  const ThetaCoords one = mirror_descent_step_numeric(cat3, p.theta(), objective_grad_theta(cat3, f, p), 1.0);
  CHECK((one.values() - q_point().theta().values()).lpNorm<Eigen::Infinity>() < 1e-8);

  CHECK_THROWS_AS(mirror_descent_step_numeric(cat3, zero, g, 0.0), NumericalError);
}

TEST_CASE("gradients convert through the metric") {
  const Point p = Point::from_eta(cat3, EtaCoords{0.2, 0.5});
  Vector g(2);
  g << 0.4, -1.1;
  const Vector ge = grad_eta_from_grad_theta(cat3, p, g);
  CHECK((cat3.metric_theta(p.theta()) * ge - g).norm() < 1e-12);
  CHECK((grad_theta_from_grad_eta(cat3, p, ge) - g).norm() < 1e-12);

  DualGradientObjective empty;
  empty.value = [](const Point&) { return 0.0; };
  CHECK_THROWS(objective_grad_eta(cat3, empty, p));
}

TEST_CASE("finite differences") {
  auto sq = [](const Vector& x) { return x.squaredNorm(); };
  Vector x(2);
  x << 1.0, 2.0;
  const Vector g = fd_gradient(sq, x, 1e-6);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-8));

  auto psi = [](const Vector& th) { return cat3.psi(ThetaCoords(th)); };
  const Vector e = fd_gradient_scaled(psi, Vector::Zero(2));
  CHECK(e[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  auto constant = [](const Vector&) { return 7.0; };
  CHECK(fd_gradient(constant, x, 1e-3) == Vector::Zero(2));

  auto bad = [](const Vector& v) { return v[0] > 1.0 ? NAN : 0.0; };
  CHECK_THROWS_AS(fd_gradient(bad, x, 1e-6), NumericalError);

  auto lin = [](const Vector& v) { return Vector(2.0 * v); };
  CHECK(relative_error(fd_jacobian(lin, x), Matrix(2.0 * Matrix::Identity(2, 2))) < 1e-9);
}
