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

#include "ldprq/tree_attacks.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ldprq/postprocess.h"

namespace ldprq {

int MgaExtraCount(double p, double q, int layer_size, int k) {
  const double extra = std::floor(p + (layer_size - 1) * q - k);
  return extra > 0.0 ? static_cast<int>(extra) : 0;
}

std::vector<OueReport> MgaTreeLayer(const DecompositionTree& tree, std::span<const int> layer_nodes,
                                    Interval q, int num_fake, const OueParams& params, Rng& rng) {
  const int n = static_cast<int>(layer_nodes.size());
  std::vector<int> inside;
  std::vector<int> outside;
  for (int i = 0; i < n; ++i) {
    if (q.Covers(tree.node(layer_nodes[i]).interval)) {
      inside.push_back(i);
    } else {
      outside.push_back(i);
    }
  }
  const int extra = std::min<int>(MgaExtraCount(params.p, params.q, n, static_cast<int>(inside.size())),
                                  static_cast<int>(outside.size()));
  std::vector<OueReport> reports(num_fake);
  for (OueReport& r : reports) {
    r.bits.assign(n, 0);
    for (int i : inside) r.bits[i] = 1;
    for (std::size_t pick : SampleWithoutReplacement(rng, outside.size(), extra)) {
      r.bits[outside[pick]] = 1;
    }
  }
  return reports;
}

AotObjective MakeAotObjective(std::span<const double> sorted_coeffs, std::int64_t max_count,
                              std::int64_t num_real, std::span<const double> real_freqs,
                              const OueParams& params) {
  if (sorted_coeffs.size() != real_freqs.size()) {
    throw std::invalid_argument("coefficient and frequency lengths differ");
  }
  if (max_count < 1) throw std::invalid_argument("need at least one fake user");
  if (num_real < 0) throw std::invalid_argument("negative real user count");
  const double total = static_cast<double>(num_real + max_count);
  const double gap = params.p - params.q;
  AotObjective obj;
  obj.coef.assign(sorted_coeffs.begin(), sorted_coeffs.end());
  obj.max_count = max_count;
  obj.unit = 1.0 / (total * gap);
  obj.base.resize(real_freqs.size());
  for (std::size_t v = 0; v < real_freqs.size(); ++v) {
    const double expected = static_cast<double>(num_real) * (params.q + gap * real_freqs[v]);
    obj.base[v] = (expected - total * params.q) / (total * gap);
  }
  return obj;
}

double EvaluateAssignment(const AotObjective& obj, std::span<const std::int64_t> counts) {
  if (counts.size() != obj.coef.size()) throw std::invalid_argument("assignment length mismatch");
  std::vector<double> est(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    est[v] = obj.base[v] + static_cast<double>(counts[v]) * obj.unit;
  }
  const NormSubResult ns = NormSub(est);
  double value = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) value += obj.coef[v] * ns.normalized[v];
  return value;
}

std::vector<std::int64_t> PotentialOptimalForm(int size, std::int64_t max_count, int k,
                                               std::int64_t t) {
  std::vector<std::int64_t> counts(size, 0);
  for (int i = 0; i < std::min(k, size); ++i) counts[i] = max_count;
  if (k < size) counts[k] = t;
  return counts;
}

namespace {

void RequireNonZero(const AotObjective& obj) {
  if (obj.coef.empty()) throw std::invalid_argument("empty layer");
  if (std::none_of(obj.coef.begin(), obj.coef.end(), [](double c) { return c != 0.0; })) {
    throw std::invalid_argument("all coefficients are zero");
  }
}

// The layer with node `slot` replaced by a free value s, other nodes fixed
// and sorted descending, so each candidate s costs O(log n).
class SlotEvaluator {
 public:
  SlotEvaluator(std::vector<double> values, std::vector<double> coefs, double slot_coef)
      : slot_coef_(slot_coef) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    const std::size_t m = values.size();
    z_.resize(m);
    sum_z_.assign(m + 1, 0.0);
    sum_c_.assign(m + 1, 0.0);
    sum_cz_.assign(m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      z_[j] = values[order[j]];
      const double c = coefs[order[j]];
      sum_z_[j + 1] = sum_z_[j] + z_[j];
      sum_c_[j + 1] = sum_c_[j] + c;
      sum_cz_[j + 1] = sum_cz_[j] + c * z_[j];
    }
  }

  // Values of s where the objective's slope can change.
  std::vector<double> Breakpoints() const {
    std::vector<double> out;
    const std::size_t m = z_.size();
    // s at which the slot joins the positive support of the others alone.
    double delta0 = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
      const double cand = (sum_z_[k] - 1.0) / static_cast<double>(k);
      if (z_[k - 1] > cand) delta0 = cand;
    }
    if (m == 0) delta0 = -1.0;
    out.push_back(delta0);
    // s at which the (j+1)-th largest other value leaves the support.
    for (std::size_t j = 0; j < m; ++j) {
      out.push_back(static_cast<double>(j + 1) * z_[j] - sum_z_[j] + 1.0);
    }
    return out;
  }

  double Evaluate(double s) const {
    const std::size_t m = z_.size();
    // Slot goes after every other value >= s.
    const std::size_t pos = static_cast<std::size_t>(
        std::upper_bound(z_.begin(), z_.end(), s, std::greater<>()) - z_.begin());
    auto value_at = [&](std::size_t j) { return j < pos ? z_[j] : (j == pos ? s : z_[j - 1]); };
    auto prefix = [&](const std::vector<double>& sums, std::size_t k, double slot_term) {
      return k <= pos ? sums[k] : sums[k - 1] + slot_term;
    };
    // Largest k (1-based) with k * w_k - S_k + 1 > 0; the condition holds on
    // a prefix of k because k * w_k - S_k is non-increasing.
    std::size_t lo = 1;
    std::size_t hi = m + 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      const double g = static_cast<double>(mid) * value_at(mid - 1) -
                       prefix(sum_z_, mid, s) + 1.0;
      if (g > 0.0) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    const std::size_t k = lo;
    const double delta = (prefix(sum_z_, k, s) - 1.0) / static_cast<double>(k);
    return prefix(sum_cz_, k, slot_coef_ * s) - delta * prefix(sum_c_, k, slot_coef_);
  }

 private:
  double slot_coef_;
  std::vector<double> z_;
  std::vector<double> sum_z_;
  std::vector<double> sum_c_;
  std::vector<double> sum_cz_;
};

}  // namespace

Assignment AotAssignmentBruteForce(const AotObjective& obj) {
  RequireNonZero(obj);
  const int n = static_cast<int>(obj.coef.size());
  Assignment best;
  best.value = -std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<std::int64_t> counts) {
    const double v = EvaluateAssignment(obj, counts);
    if (v > best.value) {
      best.value = v;
      best.counts = std::move(counts);
    }
  };
  for (int k = 0; k < n; ++k) {
    for (std::int64_t t = 0; t < obj.max_count; ++t) {
      consider(PotentialOptimalForm(n, obj.max_count, k, t));
    }
  }
  consider(PotentialOptimalForm(n, obj.max_count, n, 0));
  return best;
}

Assignment AotAssignmentFast(const AotObjective& obj) {
  RequireNonZero(obj);
  const int n = static_cast<int>(obj.coef.size());
  const double full = static_cast<double>(obj.max_count) * obj.unit;
  Assignment best;
  best.value = -std::numeric_limits<double>::infinity();
  int best_k = n;
  std::int64_t best_t = 0;

  for (int i = 0; i < n; ++i) {
    std::vector<double> values;
    std::vector<double> coefs;
    values.reserve(n - 1);
    coefs.reserve(n - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      values.push_back(obj.base[j] + (j < i ? full : 0.0));
      coefs.push_back(obj.coef[j]);
    }
    const SlotEvaluator eval(std::move(values), std::move(coefs), obj.coef[i]);
    std::vector<std::int64_t> ts = {0, obj.max_count - 1};
    for (double s : eval.Breakpoints()) {
      const double t = (s - obj.base[i]) / obj.unit;
      if (!std::isfinite(t)) continue;
      for (double r : {std::floor(t), std::ceil(t)}) {
        const double clipped = std::clamp(r, 0.0, static_cast<double>(obj.max_count - 1));
        ts.push_back(static_cast<std::int64_t>(clipped));
      }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::int64_t t : ts) {
      const double v = eval.Evaluate(obj.base[i] + static_cast<double>(t) * obj.unit);
      if (v > best.value) {
        best.value = v;
        best_k = i;
        best_t = t;
      }
    }
  }
  const std::vector<std::int64_t> all_full = PotentialOptimalForm(n, obj.max_count, n, 0);
  const double all_value = EvaluateAssignment(obj, all_full);
  if (all_value > best.value) {
    best.value = all_value;
    best_k = n;
    best_t = 0;
  }
  best.counts = PotentialOptimalForm(n, obj.max_count, best_k, best_t);
  // Report the exact value (the O(log n) path accumulates differently).
  best.value = EvaluateAssignment(obj, best.counts);
  return best;
}

std::vector<std::uint8_t> ZeroCoefficientBits(ZeroCoefStrategy strategy,
                                              const DecompositionTree& tree,
                                              std::span<const int> layer_nodes, Interval q) {
  std::vector<std::uint8_t> bits(layer_nodes.size(), 0);
  switch (strategy) {
    case ZeroCoefStrategy::kZero:
      break;
    case ZeroCoefStrategy::kOne:
      std::fill(bits.begin(), bits.end(), 1);
      break;
    case ZeroCoefStrategy::kPath:
      for (std::size_t i = 0; i < layer_nodes.size(); ++i) {
        bits[i] = tree.node(layer_nodes[i]).interval.Intersects(q) ? 1 : 0;
      }
      break;
  }
  return bits;
}

OueReport AaotTransform(OueReport report, double q, Rng& rng) {
  const int n = report.size();
  if (n == 0) return report;
  const std::int64_t target = Binomial(rng, n - 1, q) + (Bernoulli(rng, 0.5) ? 1 : 0);
  std::vector<std::size_t> ones;
  std::vector<std::size_t> zeros;
  for (int i = 0; i < n; ++i) (report.bits[i] ? ones : zeros).push_back(i);
  const std::int64_t have = static_cast<std::int64_t>(ones.size());
  if (have > target) {
    for (std::size_t pick : SampleWithoutReplacement(rng, ones.size(), have - target)) {
      report.bits[ones[pick]] = 0;
    }
  } else if (have < target) {
    for (std::size_t pick : SampleWithoutReplacement(rng, zeros.size(), target - have)) {
      report.bits[zeros[pick]] = 1;
    }
  }
  return report;
}

std::vector<OueReport> MgaTreeAttack::CraftLayer(const LayerContext& ctx, Rng& rng) {
  return MgaTreeLayer(*ctx.tree, ctx.node_ids, target_, ctx.num_fake, ctx.params, rng);
}

std::vector<OueReport> AotTreeAttack::CraftLayer(const LayerContext& ctx, Rng& rng) {
  const DecompositionTree& tree = *ctx.tree;
  const int n = static_cast<int>(ctx.node_ids.size());
  const std::vector<double> all_coef = TreeCoefficients(tree, target_);

  std::vector<OueReport> reports(ctx.num_fake);
  const bool any = std::any_of(ctx.node_ids.begin(), ctx.node_ids.end(),
                               [&](int id) { return all_coef[id] != 0.0; });
  if (!any) {
    ++heuristic_layers_;
    const std::vector<std::uint8_t> bits =
        ZeroCoefficientBits(options_.strategy, tree, ctx.node_ids, target_);
    for (OueReport& r : reports) r.bits = bits;
  } else {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return all_coef[ctx.node_ids[a]] > all_coef[ctx.node_ids[b]];
    });
    std::vector<double> coef(n);
    std::vector<double> freqs(n);
    for (int i = 0; i < n; ++i) {
      const TreeNode& node = tree.node(ctx.node_ids[order[i]]);
      coef[i] = all_coef[ctx.node_ids[order[i]]];
      // Uniform prior over the domain for the real users.
      freqs[i] = static_cast<double>(node.interval.length()) / tree.domain();
    }
    const std::int64_t real_layer =
        options_.assumed_real_users / std::max(1, ctx.planned_layers);
    const AotObjective obj = MakeAotObjective(coef, ctx.num_fake, real_layer, freqs, ctx.params);
    const Assignment a =
        options_.brute_force ? AotAssignmentBruteForce(obj) : AotAssignmentFast(obj);
    for (int j = 0; j < ctx.num_fake; ++j) {
      reports[j].bits.assign(n, 0);
      for (int i = 0; i < n; ++i) {
        if (j < a.counts[i]) reports[j].bits[order[i]] = 1;
      }
    }
  }
  if (options_.adaptive) {
    for (OueReport& r : reports) r = AaotTransform(std::move(r), ctx.params.q, rng);
  }
  return reports;
}

}  // namespace ldprq
