#include "dualgeo/experiments.hpp"

#include "dualgeo/categorical.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dualgeo {

namespace {

std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string format_fixed(double x, int digits) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_short(v[i]);
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

double iterations_or_nan(const RunTrace& trace) {
  return trace.outcome == Outcome::converged ? static_cast<double>(trace.iterations)
                                             : std::numeric_limits<double>::quiet_NaN();
}

std::string outcome_note(const RunTrace& trace) {
  if (trace.outcome == Outcome::converged) return {};
  return to_string(trace.outcome) + " after " + std::to_string(trace.iterations) + " iterations";
}

}  // namespace

ResultTable::ResultTable(std::string experiment, std::uint64_t seed,
                         std::vector<std::pair<std::string, std::string>> config)
    : experiment_(std::move(experiment)), seed_(seed), config_(std::move(config)) {}

void ResultTable::add_sample(const std::string& method, const std::string& parameter, const std::string& statistic,
                             const std::vector<double>& values, std::string note) {
  add(ResultRow{method, parameter, statistic, mean_of(values), population_std(values), static_cast<long>(values.size()),
                std::move(note)});
}

const ResultRow& ResultTable::find(const std::string& method, const std::string& parameter,
                                   const std::string& statistic) const {
  for (const auto& row : rows_) {
    if (row.method == method && row.parameter == parameter && row.statistic == statistic) return row;
  }
  throw std::out_of_range("no row " + method + " / " + parameter + " / " + statistic);
}

std::uint64_t ResultTable::config_hash() const {
  std::string canon = experiment_ + ";seed=" + std::to_string(seed_);
  for (const auto& [k, v] : config_) canon += ";" + k + "=" + v;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ResultTable::to_csv(bool include_wall_time) const {
  std::ostringstream out;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash()));
  out << "# experiment: " << experiment_ << '\n';
  out << "# seed: " << seed_ << '\n';
  for (const auto& [k, v] : config_) out << "# " << k << ": " << v << '\n';
  out << "# config_hash: " << hash << '\n';
  out << "method,parameter,statistic,mean,std,n,note\n";
  for (const auto& r : rows_) {
    out << csv_escape(r.method) << ',' << csv_escape(r.parameter) << ',' << csv_escape(r.statistic) << ','
        << format_full(r.mean) << ',' << format_full(r.std) << ',' << r.n << ',' << csv_escape(r.note) << '\n';
  }
  if (include_wall_time) out << "# wall_seconds: " << format_fixed(wall_seconds_, 3) << '\n';
  return out.str();
}

std::string ResultTable::to_markdown() const {
  const std::vector<std::string> header{"method", "parameter", "statistic", "mean", "std", "n", "note"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows_) {
    cells.push_back({r.method, r.parameter, r.statistic, format_fixed(r.mean, 3), format_fixed(r.std, 3),
                     std::to_string(r.n), r.note});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto line = [&](const std::vector<std::string>& row) {
    std::string s = "|";
    for (std::size_t c = 0; c < row.size(); ++c) s += " " + row[c] + std::string(width[c] - row[c].size(), ' ') + " |";
    return s + '\n';
  };
  std::ostringstream out;
  out << "## " << experiment_ << "\n\n";
  out << "- seed: " << seed_ << '\n';
  for (const auto& [k, v] : config_) out << "- " << k << ": " << v << '\n';
  out << "- wall time: " << format_fixed(wall_seconds_, 3) << " s\n\n";
  out << line(header);
  std::string rule = "|";
  for (std::size_t w : width) rule += std::string(w + 2, '-') + "|";
  out << rule << '\n';
  for (const auto& row : cells) out << line(row);
  return out.str();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

std::string format_full(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

ResultTable run_categorical_kl(const CategoricalKLConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("categorical-kl: n must be at least 2");
  if (cfg.trials < 1) throw ConfigError("categorical-kl: trials must be positive");
  if (!(cfg.epsilon > 0.0) || !(cfg.step_size > 0.0)) throw ConfigError("categorical-kl: epsilon and lr must be positive");

  ResultTable table("categorical-kl", cfg.seed,
                    {{"n", std::to_string(cfg.n)},
                     {"trials", std::to_string(cfg.trials)},
                     {"epsilon", format_full(cfg.epsilon)},
                     {"lr", format_full(cfg.step_size)},
                     {"halving_rule", cfg.halving_rule == HalvingRule::domain_only ? "domain_only" : "domain_and_decrease"}});

  const CategoricalModel model(cfg.n - 1);
  const Point start = Point::from_eta(model, EtaCoords(Vector::Constant(static_cast<Eigen::Index>(cfg.n - 1), 1.0 / static_cast<double>(cfg.n))));

  struct Cell {
    Connection connection;
    bool divergence_to_target;
    std::vector<double> iterations;
    std::vector<double> landing;
    long failures = 0;
  };
  std::vector<Cell> cells{{Connection::m_geodesic, true, {}, {}},
                          {Connection::e_geodesic, true, {}, {}},
                          {Connection::m_geodesic, false, {}, {}},
                          {Connection::e_geodesic, false, {}, {}}};

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = Rng::stream(cfg.seed, trial);
    Vector q(static_cast<Eigen::Index>(cfg.n));
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = rng.uniform();
    q /= q.sum();
    const Point target = Point::from_eta(model, model.eta_from_probabilities(q));

    for (auto& cell : cells) {
      DescentConfig dc;
      dc.connection = cell.connection;
      dc.step_size = cfg.step_size;
      dc.halving_rule = cfg.halving_rule;
      dc.stop.kind = StopKind::distance_to_target_eta;
      dc.stop.epsilon = cfg.epsilon;
      dc.stop.target_eta = target.eta().values();
      const auto objective = cell.divergence_to_target ? divergence_to(model, target) : divergence_from(model, target);
      const RunTrace trace = run_geodesic_descent(model, objective, start, dc);
      if (trace.outcome != Outcome::converged) {
        ++cell.failures;
        continue;
      }
      cell.iterations.push_back(static_cast<double>(trace.iterations));
      const Vector eta_final = cell.connection == Connection::m_geodesic
                                   ? trace.last()
                                   : model.eta_from_theta(ThetaCoords(trace.last())).values();
      cell.landing.push_back((eta_final - target.eta().values()).lpNorm<Eigen::Infinity>());
    }
  }

  for (const auto& cell : cells) {
    const std::string method = to_string(cell.connection);
    const std::string parameter = cell.divergence_to_target ? "f" : "h";
    const std::string note = cell.failures ? std::to_string(cell.failures) + " runs did not converge" : "";
    table.add_sample(method, parameter, "iterations", cell.iterations, note);
    double worst = 0.0;
    for (double e : cell.landing) worst = std::max(worst, e);
    table.add(ResultRow{method, parameter, "landing_error", worst, 0.0, static_cast<long>(cell.landing.size()), "max"});
  }
  return table;
}

// ---------------------------------------------------------------------------

Vector mixture_sample_counts(const MixtureModel& model, const MixtureCase& c, Rng& rng) {
  const Matrix& P = model.components();
  if (P.rows() != 4) throw ConfigError("mixture case needs a four-component model");
  Vector counts = Vector::Zero(P.cols());
  for (Eigen::Index k = 0; k < 4; ++k) {
    if (c[static_cast<std::size_t>(k)] < 0) throw ConfigError("mixture case counts must be nonnegative");
    std::vector<Eigen::Index> support;
    for (Eigen::Index x = 0; x < P.cols(); ++x) {
      if (P(k, x) > 0.0) support.push_back(x);
    }
    for (long s = 0; s < c[static_cast<std::size_t>(k)]; ++s) {
      const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(support.size()) - 1);
      counts[support[static_cast<std::size_t>(pick)]] += 1.0;
    }
  }
  return counts;
}

std::string mixture_case_label(const MixtureCase& c) {
  return "(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + "," +
         std::to_string(c[3]) + ")";
}

std::string multiplier_label(double multiplier) { return "lr=" + format_short(multiplier) + "/N"; }

ResultTable run_mixture_mle(const MixtureConfig& cfg) {
  if (cfg.cases.empty() || cfg.lr_multipliers.empty()) throw ConfigError("mixture-mle: need cases and lr values");
  for (double m : cfg.lr_multipliers) {
    if (!(m > 0.0)) throw ConfigError("mixture-mle: lr must be positive");
  }
  std::string cases;
  for (const auto& c : cfg.cases) {
    if (c[0] + c[1] + c[2] + c[3] <= 0) throw ConfigError("mixture-mle: case with no samples");
    cases += (cases.empty() ? "" : " ") + mixture_case_label(c);
  }
  ResultTable table("mixture-mle", cfg.seed,
                    {{"cases", cases},
                     {"lr_multipliers", join_doubles(cfg.lr_multipliers)},
                     {"expo_extra_multipliers", join_doubles(cfg.expo_extra_multipliers)},
                     {"epsilon", format_full(cfg.epsilon)},
                     {"max_iters", std::to_string(cfg.max_iters)}});

  const MixtureModel model = MixtureModel::four_arc_instance();
  const Matrix& P = model.components();
  const Point start = Point::from_eta(model, EtaCoords(Vector::Constant(3, 0.25)));

  for (std::size_t ci = 0; ci < cfg.cases.size(); ++ci) {
    Rng rng = Rng::stream(cfg.seed, ci);
    const Vector counts = mixture_sample_counts(model, cfg.cases[ci], rng);
    const double N = counts.sum();
    const Vector freqs = counts / N;
    const auto nll = mixture_nll(model, freqs, N);
    const std::string label = mixture_case_label(cfg.cases[ci]);

    auto run_expo = [&](double multiplier) {
      auto density = [&](const Vector& r) { return Vector(P.transpose() * r); };
      auto euclid = [&](const Vector& r) { return Vector(-P * counts.cwiseQuotient(density(r))); };
      auto monitor = [&](const Vector& r) { return Vector(-model.differences() * counts.cwiseQuotient(density(r))); };
      SimplexRunConfig sc{multiplier / N, cfg.epsilon, cfg.max_iters};
      const RunTrace trace = run_exponentiated_gradient(Vector::Constant(4, 0.25), euclid, monitor, sc);
      table.add(ResultRow{"exponentiated-gradient", label + " " + multiplier_label(multiplier), "iterations",
                          iterations_or_nan(trace), 0.0, 1, outcome_note(trace)});
    };

    for (double multiplier : cfg.lr_multipliers) run_expo(multiplier);
    for (Connection connection : {Connection::m_geodesic, Connection::e_geodesic}) {
      for (double multiplier : cfg.lr_multipliers) {
        DescentConfig dc;
        dc.connection = connection;
        dc.step_size = multiplier / N;
        dc.max_iters = cfg.max_iters;
        dc.stop.kind = StopKind::grad_norm_eta;
        dc.stop.epsilon = cfg.epsilon;
        ResultRow row{to_string(connection), label + " " + multiplier_label(multiplier), "iterations", 0.0, 0.0, 1, ""};
        try {
          const RunTrace trace = run_geodesic_descent(model, nll, start, dc);
          row.mean = iterations_or_nan(trace);
          row.note = outcome_note(trace);
        } catch (const ConvergenceError& e) {
          row.mean = std::numeric_limits<double>::quiet_NaN();
          row.note = std::string("newton failure: ") + e.what();
        }
        table.add(row);
      }
    }
    for (double multiplier : cfg.expo_extra_multipliers) run_expo(multiplier);
  }
  return table;
}

// ---------------------------------------------------------------------------

BTObservation random_bt_instance(std::size_t players, Rng& rng) {
  if (players < 2) throw ConfigError("bradley-terry: need at least two players");
  const auto n = static_cast<Eigen::Index>(players);
  CountMatrix wins = CountMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const std::int64_t games = rng.uniform_int(1, 1000);
      const std::int64_t won = rng.uniform_int(0, games);
      wins(i, j) = won;
      wins(j, i) = games - won;
    }
  }
  return BTObservation(wins);
}

ResultTable run_bradley_terry(const BradleyTerryConfig& cfg) {
  if (cfg.step_sizes.empty()) throw ConfigError("bradley-terry: need at least one lr");
  for (double t : cfg.step_sizes) {
    if (!(t > 0.0)) throw ConfigError("bradley-terry: lr must be positive");
  }
  const bool small = cfg.mode == BTMode::small;
  if (!small && (cfg.players < 2 || cfg.instances < 1)) throw ConfigError("bradley-terry: bad large-mode size");
  std::vector<std::pair<std::string, std::string>> config{{"mode", small ? "small" : "large"},
                                                          {"lr", join_doubles(cfg.step_sizes)},
                                                          {"epsilon", format_full(cfg.epsilon)},
                                                          {"max_iters", std::to_string(cfg.max_iters)}};
  if (!small) {
    config.emplace_back("players", std::to_string(cfg.players));
    config.emplace_back("instances", std::to_string(cfg.instances));
  }
  ResultTable table("bradley-terry", cfg.seed, config);

  const std::size_t instances = small ? 1 : cfg.instances;
  const bool with_expo = small || cfg.include_expo_in_large;
  struct Cells {
    std::vector<double> values;
    long failures = 0;
    std::string note;
  };
  Cells mm;
  std::vector<Cells> expo(cfg.step_sizes.size()), egeo(cfg.step_sizes.size());

  auto record = [](Cells& cells, const RunTrace& trace) {
    if (trace.outcome == Outcome::converged) {
      cells.values.push_back(static_cast<double>(trace.iterations));
    } else {
      ++cells.failures;
      cells.note = outcome_note(trace);
    }
  };

  for (std::size_t inst = 0; inst < instances; ++inst) {
    Rng rng = Rng::stream(cfg.seed, inst);
    const BTObservation x = small ? BTObservation::three_player_example() : random_bt_instance(cfg.players, rng);
    const BradleyTerryModel model = BradleyTerryModel::for_observation(x);
    const auto players = static_cast<Eigen::Index>(x.players());
    const Vector uniform = Vector::Constant(players, 1.0 / static_cast<double>(players));

    record(mm, run_mm(model, x, uniform, cfg.epsilon, cfg.max_iters));

    const auto nll = bt_nll(model, x);
    const Point start = Point::from_theta(model, ThetaCoords(Vector::Zero(players - 1)));
    for (std::size_t s = 0; s < cfg.step_sizes.size(); ++s) {
      const double t = cfg.step_sizes[s];
      if (with_expo) {
        auto euclid = [&](const Vector& pi) { return bt_nll_euclidean_grad(x, pi); };
        auto monitor = [&](const Vector& pi) { return bt_nll_grad_pi(x, pi); };
        record(expo[s], run_exponentiated_gradient(uniform, euclid, monitor, SimplexRunConfig{t, cfg.epsilon, cfg.max_iters}));
      }
      DescentConfig dc;
      dc.connection = Connection::e_geodesic;
      dc.step_size = t;
      dc.max_iters = cfg.max_iters;
      dc.stop.kind = StopKind::grad_norm_pi;
      dc.stop.epsilon = cfg.epsilon;
      dc.stop.monitored_gradient = [&](const Point& p) { return bt_nll_grad_pi(x, bt_pi_from_theta(p.theta())); };
      record(egeo[s], run_geodesic_descent(model, nll, start, dc));
    }
  }

  auto emit = [&](const std::string& method, const std::string& parameter, const Cells& cells) {
    std::string note = cells.note;
    if (cells.failures > 0 && instances > 1) note = std::to_string(cells.failures) + " failed; last: " + note;
    if (cells.values.empty()) {
      table.add(ResultRow{method, parameter, "iterations", std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN(), 0, note});
    } else {
      table.add_sample(method, parameter, "iterations", cells.values, note);
    }
  };
  emit("MM", "-", mm);
  for (std::size_t s = 0; s < cfg.step_sizes.size(); ++s) {
    const std::string parameter = "lr=" + format_short(cfg.step_sizes[s]);
    if (with_expo) emit("exponentiated-gradient", parameter, expo[s]);
    emit("e-geodesic", parameter, egeo[s]);
  }
  return table;
}

// ---------------------------------------------------------------------------

ResultTable run_vi_mlr(const VIExperimentConfig& cfg) {
  GenConfig probe{cfg.N, cfg.M, cfg.D, cfg.label_noise, 1.5, 0};
  probe.validate();
  if (cfg.trials < 1) throw ConfigError("vi-mlr: trials must be positive");
  if (cfg.lambdas.empty() || cfg.step_sizes.empty()) throw ConfigError("vi-mlr: need lambda and lr values");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) throw ConfigError("vi-mlr: train fraction must lie in (0, 1)");
  for (double l : cfg.lambdas) {
    if (!(l > 0.0)) throw ConfigError("vi-mlr: lambda must be positive");
  }
  for (double t : cfg.step_sizes) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("vi-mlr: lr must be finite and nonnegative");
  }
  const auto train_rows = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(cfg.N)));
  if (train_rows < 1 || train_rows >= cfg.N) throw ConfigError("vi-mlr: split leaves an empty part");
  MCConfig probe_mc;
  probe_mc.K = cfg.K;
  probe_mc.L = cfg.L;
  probe_mc.validate();

  ResultTable table("vi-mlr", cfg.seed,
                    {{"triple", "(" + std::to_string(cfg.N) + "," + std::to_string(cfg.M) + "," + std::to_string(cfg.D) + ")"},
                     {"lambda", join_doubles(cfg.lambdas)},
                     {"lr", join_doubles(cfg.step_sizes)},
                     {"K", std::to_string(cfg.K)},
                     {"L", std::to_string(cfg.L)},
                     {"trials", std::to_string(cfg.trials)},
                     {"train_fraction", format_full(cfg.train_fraction)},
                     {"label_noise", format_full(cfg.label_noise)}});

  const std::vector<VIMethod> methods{VIMethod::gradient, VIMethod::e_geodesic, VIMethod::m_geodesic};
  struct Cells {
    std::vector<double> train, test, halvings;
    long failures = 0;
  };
  const std::size_t cell_count = cfg.lambdas.size() * cfg.step_sizes.size() * methods.size();
  std::vector<Cells> cells(cell_count);
  const auto md = static_cast<Eigen::Index>(cfg.M * cfg.D);

  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = Rng::stream(cfg.seed, trial);
    GenConfig gen{cfg.N, cfg.M, cfg.D, cfg.label_noise, 1.5, rng.next_u64()};
    const VIDataset all = generate(gen);
    const VIDataset train = all.rows(0, train_rows);
    const VIDataset test = all.rows(train_rows, cfg.N);
    const Vector mu0 = rng.normal_vector(md);
    const Vector rho0 = rng.normal_vector(md);
    const VIState init = VIState::from_mu_rho(mu0, rho0);
    const Matrix noise = rng.normal_matrix(static_cast<Eigen::Index>(cfg.K), md);
    const Matrix predict_noise = rng.normal_matrix(static_cast<Eigen::Index>(cfg.L), md);

    std::size_t idx = 0;
    for (double lambda : cfg.lambdas) {
      MCConfig mc;
      mc.K = cfg.K;
      mc.L = cfg.L;
      mc.lambda = lambda;
      for (double lr : cfg.step_sizes) {
        for (VIMethod method : methods) {
          Cells& cell = cells[idx++];
          try {
            const VIStepResult step = vi_single_iteration(train, init, method, lr, mc, noise);
            cell.train.push_back(accuracy(train, step.state, predict_noise));
            cell.test.push_back(accuracy(test, step.state, predict_noise));
            cell.halvings.push_back(static_cast<double>(step.halvings));
          } catch (const ConvergenceError&) {
            ++cell.failures;
          }
        }
      }
    }
  }

  std::size_t idx = 0;
  for (double lambda : cfg.lambdas) {
    for (double lr : cfg.step_sizes) {
      const std::string parameter = "lambda=" + format_short(lambda) + " lr=" + format_short(lr);
      for (VIMethod method : methods) {
        const Cells& cell = cells[idx++];
        const std::string note = cell.failures ? std::to_string(cell.failures) + " step underflows" : "";
        table.add_sample(to_string(method), parameter, "train_accuracy", cell.train, note);
        table.add_sample(to_string(method), parameter, "test_accuracy", cell.test, note);
        table.add_sample(to_string(method), parameter, "halvings", cell.halvings, note);
      }
    }
  }
  return table;
}

}  // namespace dualgeo
