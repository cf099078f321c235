#include "dualgeo/finite_difference.hpp"

#include <algorithm>

namespace dualgeo {

namespace {

double checked(double v) {
  if (!std::isfinite(v)) throw NumericalError("finite difference: non-finite evaluation");
  return v;
}

}  // namespace

Vector fd_gradient(const ScalarFn& fn, const Vector& x, double h) {
  if (!(h > 0.0)) throw ConfigError("fd_gradient: step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = checked(fn(probe));
    probe[i] = x[i] - h;
    const double down = checked(fn(probe));
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Vector fd_gradient_scaled(const ScalarFn& fn, const Vector& x, double scale) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = scale * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = checked(fn(probe));
    probe[i] = x[i] - h;
    const double down = checked(fn(probe));
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Matrix fd_jacobian(const VectorFn& fn, const Vector& x, double scale) {
  Vector probe = x;
  Matrix jac;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = scale * (1.0 + std::abs(x[j]));
    probe[j] = x[j] + h;
    const Vector up = fn(probe);
    probe[j] = x[j] - h;
    const Vector down = fn(probe);
    probe[j] = x[j];
    if (!up.allFinite() || !down.allFinite()) throw NumericalError("fd_jacobian: non-finite evaluation");
    if (j == 0) jac.resize(up.size(), x.size());
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

double relative_error(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("relative_error: size mismatch");
  if (a.size() == 0) return 0.0;
  const double scale = std::max({a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>(), 1e-300});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

double relative_error(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("relative_error: shape mismatch");
  if (a.size() == 0) return 0.0;
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace dualgeo
