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

// Seeded experiment runner: datasets, queries, protocol runs with and
// without an attack, detection, and result files.

#ifndef LDPRQ_EXPERIMENT_H_
#define LDPRQ_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldprq/dataset.h"
#include "ldprq/defense.h"
#include "ldprq/tree_attacks.h"
#include "ldprq/types.h"

namespace ldprq {

enum class Protocol { kAhead, kHdg };
enum class AttackKind { kNone, kMga, kAot, kAaot, kHaog, kAog, kAaog };

Protocol ParseProtocol(const std::string& name);
std::string ProtocolName(Protocol p);
AttackKind ParseAttack(const std::string& name);
std::string AttackName(AttackKind a);
ZeroCoefStrategy ParseStrategy(const std::string& name);
std::string StrategyName(ZeroCoefStrategy s);
TailMass ParseTailMass(const std::string& name);
std::string TailMassName(TailMass t);

struct ExperimentConfig {
  Protocol protocol = Protocol::kAhead;

  // Data: a synthetic distribution, or a CSV file when csv_path is set.
  Distribution distribution = Distribution::kGaussian;
  std::optional<double> mean;    // default c / 2
  std::optional<double> stddev;  // default 40 c / 1024
  std::string csv_path;
  std::vector<std::string> csv_columns;
  std::int64_t num_users = 100000;

  std::optional<int> domain;  // default 1024 (AHEAD) or 64 (HDG)
  int dims = 5;               // HDG attributes
  int fanout = 2;
  std::optional<double> split_threshold;
  int g1 = 16;
  int g2 = 4;
  int pp_rounds = 1;
  std::optional<std::int64_t> hash_family_size;

  double epsilon = 1.0;
  double rho = 0.1;

  AttackKind attack = AttackKind::kNone;
  ZeroCoefStrategy strategy = ZeroCoefStrategy::kOne;
  std::int64_t assumed_users = 0;  // AoT's belief about N; 0 means the true N
  double beta = 0.1;               // AAoG detection tolerance

  bool defense = false;
  double alpha = 0.005;
  TailMass tail = TailMass::kNominal;

  int num_queries = 20;
  std::optional<int> query_dims;  // default 1 (AHEAD) or 3 (HDG)

  std::uint64_t seed = 1;
  int num_seeds = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string output;  // directory; empty disables file output

  int resolved_domain() const;
  int resolved_query_dims() const;
  double resolved_mean() const;
  double resolved_stddev() const;

  // Throws ConfigError with a message naming the offending field.
  void Validate() const;
};

struct TrialResult {
  std::uint64_t seed = 0;
  int query_id = 0;
  RangeQuery query;
  double true_frequency = 0.0;
  double honest_response = 0.0;
  double poisoned_response = 0.0;
  std::optional<double> efficiency;  // unset when rho = 0
  std::optional<bool> honest_detected;
  std::optional<bool> poisoned_detected;
  // Attack diagnostics.
  std::optional<bool> aog_all_found;
  std::optional<int> aaog_budget;
  double honest_seconds = 0.0;
  double poisoned_seconds = 0.0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct Summary {
  std::string protocol;
  std::string attack;
  double epsilon = 0.0;
  double rho = 0.0;
  int trials = 0;
  double mean_true = 0.0;
  double mean_honest = 0.0;
  double std_honest = 0.0;
  double mean_poisoned = 0.0;
  double std_poisoned = 0.0;
  double mean_efficiency = 0.0;
  double std_efficiency = 0.0;
  std::optional<double> detection_rate;         // poisoned runs flagged
  std::optional<double> honest_detection_rate;  // honest runs flagged
};

struct ExperimentOutput {
  std::vector<TrialResult> trials;  // ordered by (seed, query)
  Summary summary;
};

// Runs every (seed, query) trial on a worker pool. The honest run for a seed
// shares its random stream with that seed's poisoned runs. Throws
// ConfigError on invalid configuration.
ExperimentOutput RunExperiment(const ExperimentConfig& config);

Summary Summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials);

// Writes results.jsonl, summary.csv (one row per summary) and
// timings.csv into `dir`, creating it if needed. Everything except
// timings.csv is a pure function of the inputs.
void WriteOutputs(const std::string& dir, const std::vector<TrialResult>& trials,
                  const std::vector<Summary>& summaries);

std::string SummaryCsvHeader();
std::string SummaryCsvRow(const Summary& s);

}  // namespace ldprq

#endif  // LDPRQ_EXPERIMENT_H_
