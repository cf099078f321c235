#pragma once

#include "dualgeo/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dualgeo {

/// Seeded random source with platform-independent output.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so the transforms below are written out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for trial `index` of a run seeded with `master_seed`.
  static Rng stream(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi], inclusive, by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Standard normal by the Marsaglia polar method.
  double normal();
  Vector normal_vector(Eigen::Index n);
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

  /// Uniformly random permutation of 0..n-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer; used to derive per-trial seeds.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace dualgeo
