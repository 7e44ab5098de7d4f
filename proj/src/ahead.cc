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

#include "ldprq/ahead.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ldprq/postprocess.h"

namespace ldprq {

void AheadConfig::Validate() const {
  if (fanout < 2) throw ConfigError("fanout must be at least 2");
  if (domain_size < fanout) throw ConfigError("domain must be at least the fanout");
  long long power = 1;
  while (power < domain_size) power *= fanout;
  if (power != domain_size) {
    throw ConfigError("domain size " + std::to_string(domain_size) + " is not a power of fanout " +
                      std::to_string(fanout));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (split_threshold && (!(*split_threshold >= 0.0) || !std::isfinite(*split_threshold))) {
    throw ConfigError("split threshold must be a non-negative number");
  }
  if (!layer_user_partition.empty()) {
    if (static_cast<int>(layer_user_partition.size()) != max_layers()) {
      throw ConfigError("layer partition needs one share per layer (" +
                        std::to_string(max_layers()) + ")");
    }
    double total = 0.0;
    for (double s : layer_user_partition) {
      if (!(s >= 0.0)) throw ConfigError("layer shares must be non-negative");
      total += s;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("layer shares must sum to 1");
  }
}

int AheadConfig::max_layers() const {
  int layers = 0;
  for (long long span = 1; span < domain_size; span *= fanout) ++layers;
  return layers;
}

double AheadConfig::ThresholdFor(std::int64_t layer_users) const {
  if (split_threshold) return *split_threshold;
  return 2.0 * OueStddev(OueParams::Make(epsilon, 1), layer_users);
}

std::int64_t FakeUserCount(std::int64_t num_real, double rho) {
  return std::llround(rho * static_cast<double>(num_real) / (1.0 - rho));
}

std::vector<std::int64_t> SplitCounts(std::int64_t total, std::span<const double> shares) {
  std::vector<std::int64_t> counts(shares.size(), 0);
  double cumulative = 0.0;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    cumulative += shares[i];
    const std::int64_t end = i + 1 == shares.size()
                                 ? total
                                 : std::llround(cumulative * static_cast<double>(total));
    counts[i] = std::max<std::int64_t>(0, end - assigned);
    assigned += counts[i];
  }
  return counts;
}

AheadRun RunAhead(std::span<const int> values, const AheadConfig& config, TreeAttack* attack,
                  double rho, Rng& rng) {
  config.Validate();
  if (values.empty()) throw std::invalid_argument("AHEAD needs at least one user");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  for (int v : values) {
    if (v < 0 || v >= config.domain_size) throw std::invalid_argument("value outside the domain");
  }

  const int planned = config.max_layers();
  std::vector<double> shares = config.layer_user_partition;
  if (shares.empty()) shares.assign(planned, 1.0 / planned);

  const std::int64_t num_real = static_cast<std::int64_t>(values.size());
  const std::int64_t num_fake = attack ? FakeUserCount(num_real, rho) : 0;
  const std::vector<std::int64_t> real_per_layer = SplitCounts(num_real, shares);
  const std::vector<std::int64_t> fake_per_layer = SplitCounts(num_fake, shares);

  // Attack randomness gets its own stream so that honest and poisoned runs
  // from the same seed see identical real reports.
  Rng attack_rng(rng());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  AheadRun run;
  run.tree = DecompositionTree(config.domain_size);

  std::vector<char> split = {1};  // the root always splits
  std::size_t next_user = 0;
  for (int t = 1; t <= planned; ++t) {
    const std::vector<int> layer = run.tree.Grow(split, config.fanout);
    const int n = static_cast<int>(layer.size());
    const OueParams params = OueParams::Make(config.epsilon, n);
    const std::int64_t real_here = real_per_layer[t - 1];
    const std::int64_t fake_here = fake_per_layer[t - 1];
    if (real_here + fake_here <= 0) {
      throw ConfigError("layer " + std::to_string(t) + " has no users; increase N");
    }

    const std::vector<int> index = run.tree.LayerIndexOfValue(t);
    std::vector<std::int64_t> counts(n, 0);
    LayerRound round;
    round.layer = t;
    round.vector_length = n;
    round.num_real = static_cast<int>(real_here);
    round.num_fake = static_cast<int>(fake_here);
    round.ones_counts.reserve(real_here + fake_here);
    for (std::int64_t u = 0; u < real_here; ++u) {
      const OueReport report = OuePerturb(index[values[order[next_user++]]], params, rng);
      AccumulateOue(report, counts);
      round.ones_counts.push_back(report.CountOnes());
    }
    if (fake_here > 0) {
      LayerContext ctx;
      ctx.tree = &run.tree;
      ctx.layer = t;
      ctx.planned_layers = planned;
      ctx.node_ids = layer;
      ctx.num_fake = static_cast<int>(fake_here);
      ctx.params = params;
      const std::vector<OueReport> fakes = attack->CraftLayer(ctx, attack_rng);
      if (static_cast<std::int64_t>(fakes.size()) != fake_here) {
        throw std::logic_error("attack returned the wrong number of reports");
      }
      for (const OueReport& report : fakes) {
        AccumulateOue(report, counts);
        round.ones_counts.push_back(report.CountOnes());
      }
    }

    const FrequencyVector raw = OueEstimateFromCounts(counts, real_here + fake_here, params);
    const NormSubResult normalized = NormSub(raw);
    for (int i = 0; i < n; ++i) {
      TreeNode& node = run.tree.mutable_node(layer[i]);
      node.f_hat = normalized.normalized[i];
    }
    run.rounds.push_back(std::move(round));

    const double theta = config.ThresholdFor(real_here + fake_here);
    split.assign(n, 0);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      const TreeNode& node = run.tree.node(layer[i]);
      if (node.f_hat >= theta && node.interval.length() >= config.fanout) {
        split[i] = 1;
        any = true;
      }
    }
    if (!any) break;
  }
  ApplyTreeConsistency(run.tree);
  return run;
}

}  // namespace ldprq
