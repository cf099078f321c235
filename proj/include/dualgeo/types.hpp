#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>

namespace dualgeo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Strict domain predicates keep this distance from every boundary so that
// logarithms stay finite.
inline constexpr double kDomainMargin = 1e-12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalError(std::string(what) + ": non-finite entry");
}

inline void require_dim(std::size_t expected, Eigen::Index got, const char* what) {
  if (static_cast<Eigen::Index>(expected) != got) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

/// Coordinate tuple tagged with the affine chart it belongs to, so theta and
/// eta values cannot be mixed up at call sites.
template <class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(Vector values) : values_(std::move(values)) {
    require_finite(values_, "coordinates");
  }
  Coords(std::initializer_list<double> values) : values_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index i = 0;
    for (double v : values) values_[i++] = v;
    require_finite(values_, "coordinates");
  }

  const Vector& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

 private:
  Vector values_;
};

struct ThetaTag;
struct EtaTag;
using ThetaCoords = Coords<ThetaTag>;
using EtaCoords = Coords<EtaTag>;

}  // namespace dualgeo
