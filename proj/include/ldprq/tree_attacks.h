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

// Poisoning attacks against AHEAD: MGA, AoT and its adaptive variant.

#ifndef LDPRQ_TREE_ATTACKS_H_
#define LDPRQ_TREE_ATTACKS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldprq/ahead.h"
#include "ldprq/oue.h"
#include "ldprq/random.h"
#include "ldprq/tree.h"

namespace ldprq {

// max(floor(p + (n - 1) q - k), 0): extra ones MGA spends outside q.
int MgaExtraCount(double p, double q, int layer_size, int k);

// One MGA report per fake user: ones on every layer node inside q plus
// MgaExtraCount random nodes outside it.
std::vector<OueReport> MgaTreeLayer(const DecompositionTree& tree, std::span<const int> layer_nodes,
                                    Interval q, int num_fake, const OueParams& params, Rng& rng);

// Expected post-Norm-Sub layer objective for a fake-count assignment.
// Node i (in descending coefficient order) has pre-normalization estimate
// base[i] + a_i * unit.
struct AotObjective {
  std::vector<double> coef;  // descending
  std::vector<double> base;
  double unit = 0.0;
  std::int64_t max_count = 0;  // M_L
};

// Real users are assumed to hold `real_freqs` (one entry per node, in the
// same order as `sorted_coeffs`); N_L of them and M_L fake users report.
AotObjective MakeAotObjective(std::span<const double> sorted_coeffs, std::int64_t max_count,
                              std::int64_t num_real, std::span<const double> real_freqs,
                              const OueParams& params);

double EvaluateAssignment(const AotObjective& obj, std::span<const std::int64_t> counts);

struct Assignment {
  std::vector<std::int64_t> counts;  // in coefficient order
  double value = 0.0;
};

// M_L for the first k nodes, t for node k, zero after.
std::vector<std::int64_t> PotentialOptimalForm(int size, std::int64_t max_count, int k,
                                               std::int64_t t);

// Both throw std::invalid_argument when every coefficient is zero.
// Enumerates all forms (k, t), 0 <= k <= |L|, 0 <= t < M_L.
Assignment AotAssignmentBruteForce(const AotObjective& obj);
// Same optimum in O(|L|^2 log |L|): for each base assignment (first k nodes
// full), the objective is piecewise linear in the trailing count, so only
// counts next to its breakpoints need evaluating.
Assignment AotAssignmentFast(const AotObjective& obj);

enum class ZeroCoefStrategy { kZero, kOne, kPath };

// One bit per layer node for a layer whose coefficients all vanish.
std::vector<std::uint8_t> ZeroCoefficientBits(ZeroCoefStrategy strategy,
                                              const DecompositionTree& tree,
                                              std::span<const int> layer_nodes, Interval q);

// Redraws the 1-count as Bin(n-1, q) + Bin(1, 1/2) by flipping random bits.
OueReport AaotTransform(OueReport report, double q, Rng& rng);

class MgaTreeAttack : public TreeAttack {
 public:
  explicit MgaTreeAttack(Interval target) : target_(target) {}
  std::vector<OueReport> CraftLayer(const LayerContext& ctx, Rng& rng) override;

 private:
  Interval target_;
};

struct AotOptions {
  ZeroCoefStrategy strategy = ZeroCoefStrategy::kOne;
  // The attacker's estimate of the real population (split evenly over the
  // planned layers).
  std::int64_t assumed_real_users = 100000;
  bool adaptive = false;    // apply AaotTransform to each report
  bool brute_force = false; // use the enumeration instead of the fast search
};

class AotTreeAttack : public TreeAttack {
 public:
  AotTreeAttack(Interval target, AotOptions options) : target_(target), options_(options) {}
  std::vector<OueReport> CraftLayer(const LayerContext& ctx, Rng& rng) override;

  // Layers where the zero-coefficient heuristic was used (diagnostics).
  int heuristic_layers() const { return heuristic_layers_; }

 private:
  Interval target_;
  AotOptions options_;
  int heuristic_layers_ = 0;
};

}  // namespace ldprq

#endif  // LDPRQ_TREE_ATTACKS_H_
