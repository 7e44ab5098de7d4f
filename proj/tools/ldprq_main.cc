// Copyright 2026 The ldprq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ldprq: run poisoning experiments against LDP range-query protocols.
//
//   ldprq run    [options]           one configuration
//   ldprq sweep  [options]           grid over --epsilons, --rhos, --attacks
//   ldprq detect [options]           run with detection on, print rates
//   ldprq prism-check [--epsilons]   PRISM privacy-ratio check
//
// Every option may also come from an INI file given with --config.
// Exit codes: 0 success, 2 invalid configuration, 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldprq/experiment.h"
#include "ldprq/metrics.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RawOptions {
  std::string protocol = "ahead";
  std::string distribution = "gaussian";
  double mean = 0.0;
  double stddev = 0.0;
  double theta = 0.0;
  int domain = 0;
  int query_dims = 0;
  std::int64_t family_size = 0;
  std::string attack = "none";
  std::string strategy = "one";
  std::string tail = "nominal";
};

void PrintSummary(const ldprq::Summary& s) {
  std::cout << ldprq::SummaryCsvRow(s) << '\n';
}

int PrismCheck(const std::vector<double>& epsilons) {
  std::printf("epsilon,ratio,ratio_over_exp_eps,exp_eps,brute_force_ratio\n");
  const std::vector<int> zeros = {0, 0, 0};
  for (double eps : epsilons) {
    const double ratio = ldprq::PrismViolationRatio(eps);
    const double brute = ldprq::RrrOutcomeProbability(0, zeros, eps) /
                         ldprq::RrrOutcomeProbability(2, zeros, eps);
    std::printf("%.6g,%.12g,%.12g,%.12g,%.12g\n", eps, ratio, ratio / std::exp(eps), std::exp(eps),
                brute);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisoning attacks and defenses for LDP range-query protocols"};
  app.set_config("--config", "", "INI file with option values");
  app.require_subcommand(1);

  ldprq::ExperimentConfig cfg;
  RawOptions raw;
  std::vector<double> sweep_eps;
  std::vector<double> sweep_rho;
  std::vector<std::string> sweep_attacks;

  app.add_option("--protocol", raw.protocol, "ahead|hdg");
  app.add_option("--distribution", raw.distribution, "gaussian|laplace|uniform");
  auto* mean_opt = app.add_option("--mean", raw.mean, "Synthetic mean (default c/2)");
  auto* std_opt = app.add_option("--stddev", raw.stddev, "Synthetic spread (default 40c/1024)");
  app.add_option("--csv", cfg.csv_path, "Load records from this CSV instead");
  app.add_option("--columns", cfg.csv_columns, "CSV columns to use");
  app.add_option("--users", cfg.num_users, "Real users N")->capture_default_str();
  auto* domain_opt = app.add_option("--domain", raw.domain, "Domain size c (1024 AHEAD, 64 HDG)");
  app.add_option("--dims", cfg.dims, "HDG attributes d")->capture_default_str();
  app.add_option("--fanout", cfg.fanout, "AHEAD fanout B")->capture_default_str();
  auto* theta_opt = app.add_option("--theta", raw.theta, "AHEAD split threshold");
  app.add_option("--g1", cfg.g1, "1-D granularity")->capture_default_str();
  app.add_option("--g2", cfg.g2, "2-D granularity")->capture_default_str();
  app.add_option("--pp-rounds", cfg.pp_rounds, "HDG post-processing rounds")->capture_default_str();
  auto* family_opt = app.add_option("--family-size", raw.family_size, "OLH hash family size");
  app.add_option("--epsilon", cfg.epsilon, "Privacy budget")->capture_default_str();
  app.add_option("--rho", cfg.rho, "Fake-user fraction M/(N+M)")->capture_default_str();
  app.add_option("--attack", raw.attack, "none|mga|aot|aaot|haog|aog|aaog");
  app.add_option("--strategy", raw.strategy, "AoT zero-coefficient heuristic: zero|one|path");
  app.add_option("--assumed-users", cfg.assumed_users, "AoT's assumed N (0: true N)");
  app.add_option("--beta", cfg.beta, "AAoG detection tolerance")->capture_default_str();
  app.add_flag("--defense", cfg.defense, "Run the detectors");
  app.add_option("--alpha", cfg.alpha, "Detector significance level")->capture_default_str();
  app.add_option("--tail", raw.tail, "Tree detector tail mass: nominal|exact|inside");
  app.add_option("--queries", cfg.num_queries, "Queries per seed")->capture_default_str();
  auto* qdims_opt = app.add_option("--query-dims", raw.query_dims, "Attributes per query");
  app.add_option("--seed", cfg.seed, "First seed")->capture_default_str();
  app.add_option("--seeds", cfg.num_seeds, "Number of seeds")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--out", cfg.output, "Output directory");

  auto* run = app.add_subcommand("run", "Run one configuration");
  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations");
  sweep->add_option("--epsilons", sweep_eps, "Epsilon values");
  sweep->add_option("--rhos", sweep_rho, "Rho values");
  sweep->add_option("--attacks", sweep_attacks, "Attack names");
  auto* detect = app.add_subcommand("detect", "Run with detection and report rates");
  auto* prism = app.add_subcommand("prism-check", "Check the PRISM privacy ratio");
  std::vector<double> prism_eps = {0.5, 1.0, 2.0};
  prism->add_option("--epsilons", prism_eps, "Epsilon values");
  for (CLI::App* sub : {run, sweep, detect, prism}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*prism) return PrismCheck(prism_eps);

    cfg.protocol = ldprq::ParseProtocol(raw.protocol);
    cfg.distribution = ldprq::ParseDistribution(raw.distribution);
    cfg.attack = ldprq::ParseAttack(raw.attack);
    cfg.strategy = ldprq::ParseStrategy(raw.strategy);
    cfg.tail = ldprq::ParseTailMass(raw.tail);
    if (mean_opt->count() > 0) cfg.mean = raw.mean;
    if (std_opt->count() > 0) cfg.stddev = raw.stddev;
    if (domain_opt->count() > 0) cfg.domain = raw.domain;
    if (theta_opt->count() > 0) cfg.split_threshold = raw.theta;
    if (family_opt->count() > 0) cfg.hash_family_size = raw.family_size;
    if (qdims_opt->count() > 0) cfg.query_dims = raw.query_dims;
    if (*detect) cfg.defense = true;

    if (*sweep) {
      if (sweep_eps.empty()) sweep_eps = {cfg.epsilon};
      if (sweep_rho.empty()) sweep_rho = {cfg.rho};
      if (sweep_attacks.empty()) sweep_attacks = {raw.attack};
      // Validate the whole grid before running any of it.
      std::vector<ldprq::ExperimentConfig> grid;
      for (const std::string& a : sweep_attacks) {
        for (double eps : sweep_eps) {
          for (double rho : sweep_rho) {
            ldprq::ExperimentConfig c = cfg;
            c.attack = ldprq::ParseAttack(a);
            c.epsilon = eps;
            c.rho = rho;
            c.output.clear();
            c.Validate();
            grid.push_back(c);
          }
        }
      }
      std::vector<ldprq::TrialResult> all;
      std::vector<ldprq::Summary> summaries;
      std::cout << ldprq::SummaryCsvHeader() << '\n';
      for (const ldprq::ExperimentConfig& c : grid) {
        ldprq::ExperimentOutput out = ldprq::RunExperiment(c);
        PrintSummary(out.summary);
        summaries.push_back(out.summary);
        if (!cfg.output.empty()) {
          const std::string name = ldprq::ProtocolName(c.protocol) + "_" +
                                   ldprq::AttackName(c.attack) + "_eps" + std::to_string(c.epsilon) +
                                   "_rho" + std::to_string(c.rho);
          ldprq::WriteOutputs((std::filesystem::path(cfg.output) / name).string(), out.trials,
                              {out.summary});
        }
      }
      if (!cfg.output.empty()) ldprq::WriteOutputs(cfg.output, {}, summaries);
      return 0;
    }

    const ldprq::ExperimentOutput out = ldprq::RunExperiment(cfg);
    std::cout << ldprq::SummaryCsvHeader() << '\n';
    PrintSummary(out.summary);
    if (*detect) {
      std::printf("detection_rate=%.4f honest_detection_rate=%.4f trials=%d\n",
                  out.summary.detection_rate.value_or(0.0),
                  out.summary.honest_detection_rate.value_or(0.0), out.summary.trials);
    }
    return 0;
  } catch (const ldprq::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
