#include <doctest.h>

#include "dualgeo/datagen.hpp"

#include <algorithm>
#include <set>

using namespace dualgeo;

TEST_CASE("partition sizes") {
  CHECK(partition_sizes(7, 3) == std::vector<std::size_t>{3, 2, 2});
  CHECK(partition_sizes(9, 3) == std::vector<std::size_t>{3, 3, 3});
  CHECK(partition_sizes(200, 3) == std::vector<std::size_t>{67, 67, 66});
}

TEST_CASE("generated data shape and labels") {
  const GeneratedData g = generate_detailed(GenConfig{200, 5, 3, 0.03, 1.5, 42});
  CHECK(g.data.samples() == 200);
  CHECK(g.data.features() == 5);
  CHECK(g.data.classes() == 3);
  g.data.validate();

  std::vector<std::size_t> counts(3, 0);
  for (std::size_t c : g.clean_labels) ++counts[c];
  CHECK(counts == partition_sizes(200, 3));

  std::vector<std::size_t> perm = g.feature_permutation;
  std::sort(perm.begin(), perm.end());
  CHECK(perm == std::vector<std::size_t>{0, 1, 2, 3, 4});

  std::set<std::vector<double>> centers;
  for (const auto& c : g.centers) {
    CHECK((c.array().abs() == 1.5).all());
    centers.insert(std::vector<double>(c.data(), c.data() + c.size()));
  }
  CHECK(centers.size() == 3);
  for (const auto& a : g.factors) {
    CHECK(a.maxCoeff() < 1.0);
    CHECK(a.minCoeff() >= -1.0);
  }

  // Rows without relabeling keep their clean class.
  for (std::size_t i = 0; i < g.data.samples(); ++i) {
    if (!g.relabeled[i]) CHECK(g.data.label(i) == g.clean_labels[i]);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const GenConfig cfg{60, 3, 4, 0.0, 1.5, 7};
  const VIDataset a = generate(cfg);
  const VIDataset b = generate(cfg);
  CHECK(a.X == b.X);
  CHECK(a.Y == b.Y);
  GenConfig other = cfg;
  other.seed = 8;
  CHECK(generate(other).X != a.X);
}

TEST_CASE("all vertices used when D = 2^M") {
  const GeneratedData g = generate_detailed(GenConfig{16, 2, 4, 0.0, 1.5, 3});
  std::set<std::pair<double, double>> seen;
  for (const auto& c : g.centers) seen.insert({c[0], c[1]});
  CHECK(seen.size() == 4);
}

TEST_CASE("invalid generator configurations") {
  CHECK_THROWS_AS(generate(GenConfig{10, 2, 5, 0.03, 1.5, 0}), ConfigError);
  CHECK_THROWS_AS(generate(GenConfig{2, 3, 3, 0.03, 1.5, 0}), ConfigError);
  CHECK_THROWS_AS(generate(GenConfig{10, 3, 3, 1.5, 1.5, 0}), ConfigError);
  CHECK_THROWS_AS(generate(GenConfig{10, 3, 3, 0.03, 0.0, 0}), ConfigError);
}
