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

// AHEAD: adaptive hierarchical decomposition with layer-wise OUE rounds.

#ifndef LDPRQ_AHEAD_H_
#define LDPRQ_AHEAD_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldprq/oue.h"
#include "ldprq/random.h"
#include "ldprq/tree.h"

namespace ldprq {

struct AheadConfig {
  int domain_size = 1024;
  int fanout = 2;
  double epsilon = 1.0;
  // Split a node when its f_hat reaches this value. Unset: twice the OUE
  // standard deviation for the layer's user count.
  std::optional<double> split_threshold;
  // Share of users per potential layer; empty means uniform.
  std::vector<double> layer_user_partition;

  // Throws ConfigError.
  void Validate() const;
  // log_B(c): the number of OUE rounds in a fully grown tree.
  int max_layers() const;
  double ThresholdFor(std::int64_t layer_users) const;
};

// What the server discloses when it asks a layer's users to report.
struct LayerContext {
  const DecompositionTree* tree = nullptr;  // the requested layer is the deepest
  int layer = 0;                            // 1-based round index
  int planned_layers = 0;
  std::span<const int> node_ids;
  int num_fake = 0;
  OueParams params;
};

class TreeAttack {
 public:
  virtual ~TreeAttack() = default;
  // Must return exactly ctx.num_fake reports of length |node_ids|.
  virtual std::vector<OueReport> CraftLayer(const LayerContext& ctx, Rng& rng) = 0;
};

// Per-round record kept for the detector.
struct LayerRound {
  int layer = 0;
  int vector_length = 0;
  int num_real = 0;
  int num_fake = 0;
  std::vector<int> ones_counts;  // real users first, then fake users
};

struct AheadRun {
  DecompositionTree tree;
  std::vector<LayerRound> rounds;
};

// Fake users: M = round(rho N / (1 - rho)), spread over layers like the real
// users. Throws std::invalid_argument on empty input, values outside the
// domain, or rho outside [0, 1); ConfigError when a layer would get no users.
AheadRun RunAhead(std::span<const int> values, const AheadConfig& config, TreeAttack* attack,
                  double rho, Rng& rng);

// Fake-user count for N real users at fake fraction rho.
std::int64_t FakeUserCount(std::int64_t num_real, double rho);

// Splits `total` into len(shares) consecutive blocks by cumulative rounding.
std::vector<std::int64_t> SplitCounts(std::int64_t total, std::span<const double> shares);

}  // namespace ldprq

#endif  // LDPRQ_AHEAD_H_
