// Command-line harness for the geodesic-descent experiments.
#include "dualgeo/checks.hpp"
#include "dualgeo/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace dualgeo;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "md"}));
}

void emit(const Common& c, const std::string& payload) {
  if (c.out.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream file(c.out);
  if (!file) throw ConfigError("cannot open " + c.out + " for writing");
  file << payload;
}

template <class Fn>
void timed(const Common& c, Fn&& run) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultTable table = run();
  table.set_wall_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  emit(c, c.format == "md" ? table.to_markdown() : table.to_csv());
}

MixtureCase parse_case(const std::vector<long>& v) {
  if (v.size() != 4) throw ConfigError("--case needs four comma-separated counts");
  return {v[0], v[1], v[2], v[3]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic descent on dually flat spaces: experiment harness"};
  app.require_subcommand(1);

  Common common;

  CategoricalKLConfig cat_cfg;
  std::string halving = "domain_only";
  auto* cat = app.add_subcommand("categorical-kl", "Iterations to minimize KL divergences on the categorical family");
  add_common(cat, common);
  cat->add_option("--n", cat_cfg.n, "Number of categories");
  cat->add_option("--trials", cat_cfg.trials, "Random targets");
  cat->add_option("--epsilon", cat_cfg.epsilon, "Stop when ||eta - eta(q)|| < epsilon");
  cat->add_option("--lr", cat_cfg.step_size, "Initial step size");
  cat->add_option("--halving", halving, "Halving rule")->check(CLI::IsMember({"domain_only", "domain_and_decrease"}));

  MixtureConfig mix_cfg;
  std::vector<std::vector<long>> mix_cases;
  auto* mix = app.add_subcommand("mixture-mle", "Maximum likelihood on the four-component mixture family");
  add_common(mix, common);
  mix->add_option("--case", mix_cases, "Counts per component, e.g. 700,100,100,100 (repeatable)")->delimiter(',')->allow_extra_args(false);
  mix->add_option("--lr", mix_cfg.lr_multipliers, "Step sizes in units of 1/N")->delimiter(',');
  mix->add_option("--expo-lr", mix_cfg.expo_extra_multipliers, "Extra exponentiated-gradient step sizes in units of 1/N")->delimiter(',');
  mix->add_option("--epsilon", mix_cfg.epsilon, "Stop when the eta-gradient norm is below epsilon");
  mix->add_option("--max-iters", mix_cfg.max_iters, "Iteration budget per run");

  BradleyTerryConfig bt_cfg;
  std::string bt_mode = "small";
  auto* bt = app.add_subcommand("bradley-terry", "MM, exponentiated gradient and e-geodesic on Bradley-Terry data");
  add_common(bt, common);
  bt->add_option("--mode", bt_mode, "small (three players) or large (random instances)")->check(CLI::IsMember({"small", "large"}));
  bt->add_option("--lr", bt_cfg.step_sizes, "Step sizes")->delimiter(',');
  bt->add_option("--players", bt_cfg.players, "Players per random instance");
  bt->add_option("--trials", bt_cfg.instances, "Random instances in large mode");
  bt->add_option("--epsilon", bt_cfg.epsilon, "Stop when the pi-gradient norm is below epsilon");
  bt->add_option("--max-iters", bt_cfg.max_iters, "Iteration budget per run");
  bt->add_flag("--with-expo", bt_cfg.include_expo_in_large, "Also run exponentiated gradient in large mode");

  VIExperimentConfig vi_cfg;
  std::vector<std::size_t> triple;
  auto* vi = app.add_subcommand("vi-mlr", "One-iteration variational inference for multinomial logistic regression");
  add_common(vi, common);
  vi->add_option("--triple", triple, "N,M,D")->delimiter(',')->expected(3);
  vi->add_option("--lambda", vi_cfg.lambdas, "Prior precisions")->delimiter(',');
  vi->add_option("--lr", vi_cfg.step_sizes, "Initial step sizes")->delimiter(',');
  vi->add_option("--K", vi_cfg.K, "Monte-Carlo draws for the objective");
  vi->add_option("--L", vi_cfg.L, "Posterior draws for prediction");
  vi->add_option("--trials", vi_cfg.trials, "Repetitions");

  auto* chk = app.add_subcommand("checks", "Run the property suites");
  std::uint64_t check_seed = 0;
  chk->add_option("--seed", check_seed, "Seed for the random fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cat) {
      cat_cfg.seed = common.seed;
      cat_cfg.halving_rule = halving == "domain_only" ? HalvingRule::domain_only : HalvingRule::domain_and_decrease;
      timed(common, [&] { return run_categorical_kl(cat_cfg); });
    } else if (*mix) {
      mix_cfg.seed = common.seed;
      if (!mix_cases.empty()) {
        mix_cfg.cases.clear();
        for (const auto& c : mix_cases) mix_cfg.cases.push_back(parse_case(c));
      }
      timed(common, [&] { return run_mixture_mle(mix_cfg); });
    } else if (*bt) {
      bt_cfg.seed = common.seed;
      bt_cfg.mode = bt_mode == "small" ? BTMode::small : BTMode::large;
      if (bt_cfg.mode == BTMode::large && bt->count("--lr") == 0) bt_cfg.step_sizes = {1.0};
      timed(common, [&] { return run_bradley_terry(bt_cfg); });
    } else if (*vi) {
      vi_cfg.seed = common.seed;
      if (!triple.empty()) {
        vi_cfg.N = triple[0];
        vi_cfg.M = triple[1];
        vi_cfg.D = triple[2];
      }
      timed(common, [&] { return run_vi_mlr(vi_cfg); });
    } else if (*chk) {
      const CheckReport report = run_checks(ChecksConfig{check_seed});
      std::cout << report.to_text();
      return report.all_passed() ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
