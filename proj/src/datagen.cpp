#include "dualgeo/datagen.hpp"

#include <cmath>
#include <set>

namespace dualgeo {

void GenConfig::validate() const {
  if (M < 1 || D < 1) throw ConfigError("GenConfig: M and D must be at least 1");
  if (N < D) throw ConfigError("GenConfig: need N >= D");
  if (M < 63 && D > (std::size_t{1} << M)) throw ConfigError("GenConfig: more classes than hypercube vertices");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw ConfigError("GenConfig: label_noise must lie in [0, 1]");
  if (!(cube_half_width > 0.0) || !std::isfinite(cube_half_width)) {
    throw ConfigError("GenConfig: cube_half_width must be positive");
  }
}

std::vector<std::size_t> partition_sizes(std::size_t N, std::size_t D) {
  if (D == 0) throw ConfigError("partition_sizes: D must be positive");
  std::vector<std::size_t> sizes(D, N / D);
  for (std::size_t j = 0; j < N % D; ++j) ++sizes[j];
  return sizes;
}

GeneratedData generate_detailed(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const auto M = static_cast<Eigen::Index>(cfg.M);
  GeneratedData out;

  std::vector<std::size_t> labels;
  labels.reserve(cfg.N);
  const auto sizes = partition_sizes(cfg.N, cfg.D);
  for (std::size_t j = 0; j < cfg.D; ++j) labels.insert(labels.end(), sizes[j], j);

  // Distinct vertices by rejection on the sign pattern.
  std::set<std::vector<bool>> seen;
  while (out.centers.size() < cfg.D) {
    std::vector<bool> bits(cfg.M);
    for (std::size_t k = 0; k < cfg.M; ++k) bits[k] = (rng.next_u64() >> 63) != 0;
    if (!seen.insert(bits).second) continue;
    Vector c(M);
    for (Eigen::Index k = 0; k < M; ++k) c[k] = bits[static_cast<std::size_t>(k)] ? cfg.cube_half_width : -cfg.cube_half_width;
    out.centers.push_back(c);
  }
  for (std::size_t j = 0; j < cfg.D; ++j) {
    Matrix a(M, M);
    for (Eigen::Index r = 0; r < M; ++r) {
      for (Eigen::Index c = 0; c < M; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
    }
    out.factors.push_back(a);
  }

  Matrix X(static_cast<Eigen::Index>(cfg.N), M);
  for (std::size_t i = 0; i < cfg.N; ++i) {
    const std::size_t j = labels[i];
    X.row(static_cast<Eigen::Index>(i)) = (out.centers[j] + out.factors[j].transpose() * rng.normal_vector(M)).transpose();
  }

  std::vector<std::size_t> noisy = labels;
  std::vector<bool> relabeled(cfg.N, false);
  for (std::size_t i = 0; i < cfg.N; ++i) {
    if (rng.uniform() < cfg.label_noise) {
      relabeled[i] = true;
      noisy[i] = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(cfg.D) - 1));
    }
  }

  const auto order = rng.permutation(cfg.N);
  out.feature_permutation = rng.permutation(cfg.M);

  out.data.X.resize(static_cast<Eigen::Index>(cfg.N), M);
  out.data.Y = Matrix::Zero(static_cast<Eigen::Index>(cfg.N), static_cast<Eigen::Index>(cfg.D));
  out.clean_labels.resize(cfg.N);
  out.relabeled.resize(cfg.N);
  for (std::size_t r = 0; r < cfg.N; ++r) {
    const std::size_t src = order[r];
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index k = 0; k < M; ++k) {
      out.data.X(row, k) = X(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(out.feature_permutation[static_cast<std::size_t>(k)]));
    }
    out.data.Y(row, static_cast<Eigen::Index>(noisy[src])) = 1.0;
    out.clean_labels[r] = labels[src];
    out.relabeled[r] = relabeled[src];
  }
  return out;
}

VIDataset generate(const GenConfig& cfg) { return generate_detailed(cfg).data; }

}  // namespace dualgeo
