#pragma once

#include "dualgeo/datagen.hpp"
#include "dualgeo/mixture.hpp"
#include "dualgeo/optimizers.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dualgeo {

struct ResultRow {
  std::string method;
  std::string parameter;
  std::string statistic;
  double mean = 0.0;
  /// Population standard deviation over the n values.
  double std = 0.0;
  long n = 0;
  /// Free text such as "overflow" or a failure count.
  std::string note;
};

class ResultTable {
 public:
  ResultTable(std::string experiment, std::uint64_t seed, std::vector<std::pair<std::string, std::string>> config);

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::pair<std::string, std::string>>& config() const { return config_; }
  const std::vector<ResultRow>& rows() const { return rows_; }

  void add(ResultRow row) { rows_.push_back(std::move(row)); }
  /// Row from a list of per-trial values.
  void add_sample(const std::string& method, const std::string& parameter, const std::string& statistic,
                  const std::vector<double>& values, std::string note = {});
  /// Throws std::out_of_range if absent.
  const ResultRow& find(const std::string& method, const std::string& parameter, const std::string& statistic) const;

  /// FNV-1a over the canonical "experiment;seed;key=value;..." string.
  std::uint64_t config_hash() const;
  void set_wall_seconds(double s) { wall_seconds_ = s; }
  double wall_seconds() const { return wall_seconds_; }

  /// Comment-line metadata followed by rows at full precision. The wall-time
  /// line comes last so the rest of the payload is reproducible.
  std::string to_csv(bool include_wall_time = true) const;
  std::string to_markdown() const;

 private:
  std::string experiment_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<ResultRow> rows_;
  double wall_seconds_ = 0.0;
};

double mean_of(const std::vector<double>& v);
double population_std(const std::vector<double>& v);
/// Shortest string that reads back to the same double; "nan"/"inf" spelled out.
std::string format_full(double x);

struct CategoricalKLConfig {
  std::size_t n = 3;
  std::size_t trials = 100;
  double epsilon = 1e-5;
  double step_size = 1.0;
  HalvingRule halving_rule = HalvingRule::domain_only;
  std::uint64_t seed = 0;
};

/// Rows: method in {m-geodesic, e-geodesic}, parameter in {f, h},
/// statistics "iterations" and "landing_error" (max over trials of
/// ||eta - eta(q)||_inf at termination).
ResultTable run_categorical_kl(const CategoricalKLConfig& cfg);

using MixtureCase = std::array<long, 4>;

struct MixtureConfig {
  std::vector<MixtureCase> cases{{250, 250, 250, 250}, {400, 400, 100, 100}, {700, 100, 100, 100}};
  /// Step sizes in units of 1/N.
  std::vector<double> lr_multipliers{0.5, 1.0, 1.5};
  /// Extra multipliers run for exponentiated gradient only.
  std::vector<double> expo_extra_multipliers{1.6, 1.7, 1.8, 1.9, 2.0, 2.1};
  double epsilon = 1e-5;
  long max_iters = 100000;
  std::uint64_t seed = 0;
};

/// Counts over the 8-point space for one case: case[k] points uniform on
/// the support of component k.
Vector mixture_sample_counts(const MixtureModel& model, const MixtureCase& c, Rng& rng);

std::string mixture_case_label(const MixtureCase& c);
std::string multiplier_label(double multiplier);

/// Rows: method in {exponentiated-gradient, m-geodesic, e-geodesic},
/// parameter "<case> lr=<k>/N", statistic "iterations" (one value per cell,
/// NaN with a note when the run fails).
ResultTable run_mixture_mle(const MixtureConfig& cfg);

enum class BTMode { small, large };

struct BradleyTerryConfig {
  BTMode mode = BTMode::small;
  std::vector<double> step_sizes{0.01, 1.0};
  std::size_t players = 100;
  std::size_t instances = 100;
  double epsilon = 1e-5;
  long max_iters = 100000;
  /// The large mode skips exponentiated gradient (it overflows at lr = 1).
  bool include_expo_in_large = false;
  std::uint64_t seed = 0;
};

/// n_ij ~ U{1..1000} for i < j, x_ij ~ U{0..n_ij}, x_ji = n_ij - x_ij.
BTObservation random_bt_instance(std::size_t players, Rng& rng);

/// Rows: method in {MM, exponentiated-gradient, e-geodesic}, parameter
/// "lr=<t>", statistic "iterations". Overflow is a NaN cell noted "overflow".
ResultTable run_bradley_terry(const BradleyTerryConfig& cfg);

struct VIExperimentConfig {
  std::size_t N = 200;
  std::size_t M = 5;
  std::size_t D = 3;
  std::vector<double> lambdas{0.01, 1.0, 100.0};
  std::vector<double> step_sizes{0.01, 1.0, 100.0};
  std::size_t K = 1000;
  std::size_t L = 10;
  std::size_t trials = 20;
  double train_fraction = 0.7;
  double label_noise = 0.03;
  std::uint64_t seed = 0;
};

/// Rows: method in {gradient, e-geodesic, m-geodesic}, parameter
/// "lambda=<l> lr=<t>", statistics "train_accuracy", "test_accuracy" and
/// "halvings".
ResultTable run_vi_mlr(const VIExperimentConfig& cfg);

}  // namespace dualgeo
