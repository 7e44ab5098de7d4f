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

// Slow reference implementations used only by tests. None of them calls
// into the library code it checks.

#ifndef LDPRQ_TESTS_ORACLES_H_
#define LDPRQ_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "ldprq/tree.h"

namespace ldprq::oracle {

struct Normalized {
  double delta = 0.0;
  std::vector<double> values;
};

// Bisection on the non-increasing map delta -> sum max(f_i - delta, 0).
inline Normalized NormSubBisection(const std::vector<double>& f) {
  auto mass = [&](double d) {
    double s = 0.0;
    for (double v : f) s += std::max(v - d, 0.0);
    return s;
  };
  double lo = *std::min_element(f.begin(), f.end()) - 1.0;
  double hi = *std::max_element(f.begin(), f.end());
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? lo : hi) = mid;
  }
  Normalized out;
  out.delta = 0.5 * (lo + hi);
  for (double v : f) out.values.push_back(std::max(v - out.delta, 0.0));
  return out;
}

// Recursive evaluation of the parent-child weighted average.
inline double ConsistentValue(const DecompositionTree& tree, int id) {
  const TreeNode& n = tree.node(id);
  if (n.is_leaf()) return n.f_hat;
  double k = static_cast<double>(n.children.size());
  // A lone child over the same range stands for a split into fanout parts.
  if (n.children.size() == 1 && tree.node(n.children[0]).interval == n.interval) {
    k = tree.fanout();
  }
  double sum = 0.0;
  for (int c : n.children) sum += ConsistentValue(tree, c);
  return k / (k + 1.0) * n.f_hat + 1.0 / (k + 1.0) * sum;
}

// Expected normalized layer for fake counts a_i on top of N real users with
// frequencies f_i; returns sum c_i * normalized_i.
struct LayerProblem {
  std::vector<double> coef;
  std::vector<double> real_freqs;
  std::int64_t num_real = 0;
  std::int64_t max_count = 0;
  double p = 0.5;
  double q = 0.25;

  double Value(const std::vector<std::int64_t>& counts) const {
    const double total = static_cast<double>(num_real + max_count);
    std::vector<double> est;
    for (std::size_t i = 0; i < coef.size(); ++i) {
      const double ones = num_real * (q + (p - q) * real_freqs[i]) +
                          static_cast<double>(counts[i]);
      est.push_back((ones - total * q) / (total * (p - q)));
    }
    const Normalized n = NormSubBisection(est);
    double v = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) v += coef[i] * n.values[i];
    return v;
  }
};

// Best value over every vector in [0, M]^L.
inline double ExhaustiveOptimum(const LayerProblem& prob) {
  const std::size_t n = prob.coef.size();
  std::vector<std::int64_t> counts(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    if (i == n) {
      best = std::max(best, prob.Value(counts));
      return;
    }
    for (std::int64_t a = 0; a <= prob.max_count; ++a) {
      counts[i] = a;
      walk(i + 1);
    }
  };
  walk(0);
  return best;
}

// Best value over the forms (M, ..., M, t, 0, ..., 0).
inline double PotentialFormOptimum(const LayerProblem& prob) {
  const int n = static_cast<int>(prob.coef.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    for (std::int64_t t = 0; t <= (k < n ? prob.max_count : 0); ++t) {
      std::vector<std::int64_t> counts(n, 0);
      for (int i = 0; i < k; ++i) counts[i] = prob.max_count;
      if (k < n) counts[k] = t;
      best = std::max(best, prob.Value(counts));
    }
  }
  return best;
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
};

// Pearson statistic of `observed` against `probs` (same length), pooling
// neighbouring bins until each expects at least 5 hits; a thin remainder
// joins the last bin.
inline ChiSquare PooledChiSquare(const std::vector<std::int64_t>& observed,
                                 const std::vector<double>& probs) {
  double total = 0.0;
  for (std::int64_t o : observed) total += static_cast<double>(o);
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += probs[i] * total;
    if (e >= 5.0) {
      bins.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (bins.empty()) bins.emplace_back(0.0, 0.0);
  bins.back().first += o;
  bins.back().second += e;
  ChiSquare out;
  for (auto [bo, be] : bins) out.statistic += (bo - be) * (bo - be) / be;
  out.dof = static_cast<int>(bins.size()) - 1;
  return out;
}

// Upper 1% point of chi-square, Wilson-Hilferty approximation.
inline double ChiSquareUpper1(int dof) {
  const double k = dof;
  const double z = 2.3263478740408408;
  const double c = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - c + z * std::sqrt(c), 3.0);
}

}  // namespace ldprq::oracle

#endif  // LDPRQ_TESTS_ORACLES_H_
