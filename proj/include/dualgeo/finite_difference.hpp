#pragma once

#include "dualgeo/types.hpp"

#include <functional>

namespace dualgeo {

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;

// Central differences (fn(x + h e_i) - fn(x - h e_i)) / 2h with a fixed step.
Vector fd_gradient(const ScalarFn& fn, const Vector& x, double h);

// Central differences with per-coordinate step scale * (1 + |x_i|).
Vector fd_gradient_scaled(const ScalarFn& fn, const Vector& x, double scale = 1e-6);

// Column j holds the central difference of fn along x_j.
Matrix fd_jacobian(const VectorFn& fn, const Vector& x, double scale = 1e-6);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf), with a tiny floor so that two
/// zero vectors compare equal.
double relative_error(const Vector& a, const Vector& b);
double relative_error(const Matrix& a, const Matrix& b);

}  // namespace dualgeo
