#pragma once

#include "dualgeo/varinf.hpp"

#include <cstdint>
#include <vector>

namespace dualgeo {

/// Gaussian-cluster classification data: one cluster per class, centered on
/// a distinct vertex of the hypercube [-w, w]^M.
struct GenConfig {
  std::size_t N = 200;
  std::size_t M = 5;
  std::size_t D = 3;
  double label_noise = 0.03;
  double cube_half_width = 1.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeneratedData {
  VIDataset data;
  /// Class before label noise, in output row order.
  std::vector<std::size_t> clean_labels;
  /// True where label noise redrew the class (the redraw may repeat it).
  std::vector<bool> relabeled;
  /// Output column k holds original feature feature_permutation[k].
  std::vector<std::size_t> feature_permutation;
  /// Cluster centers and covariance factors in the original feature order;
  /// class j has covariance factors[j]^T factors[j].
  std::vector<Vector> centers;
  std::vector<Matrix> factors;
};

/// Sizes of the D ordered subsets: the first N mod D get ceil(N/D).
std::vector<std::size_t> partition_sizes(std::size_t N, std::size_t D);

GeneratedData generate_detailed(const GenConfig& cfg);
VIDataset generate(const GenConfig& cfg);

}  // namespace dualgeo
