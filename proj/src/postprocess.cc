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

#include "ldprq/postprocess.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ldprq {

NormSubResult NormSub(std::span<const double> freqs) {
  if (freqs.empty()) throw std::invalid_argument("Norm-Sub needs a non-empty vector");
  for (double f : freqs) {
    if (!std::isfinite(f)) throw std::invalid_argument("Norm-Sub input must be finite");
  }
  std::vector<double> sorted(freqs.begin(), freqs.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // delta = (S_k - 1) / k for the largest k whose k-th value stays above it.
  double prefix = 0.0;
  double delta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] > candidate) delta = candidate;
  }
  NormSubResult result;
  result.delta = delta;
  result.normalized.resize(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    result.normalized[i] = std::max(freqs[i] - delta, 0.0);
  }
  return result;
}

namespace {

double Consolidate(DecompositionTree& tree, int id) {
  TreeNode& n = tree.mutable_node(id);
  if (n.is_leaf()) {
    n.f_tilde = n.f_hat;
    return n.f_tilde;
  }
  double child_sum = 0.0;
  // Copy: recursion may not touch this node, but keep the reference fresh.
  const std::vector<int> children = n.children;
  for (int child : children) child_sum += Consolidate(tree, child);
  TreeNode& self = tree.mutable_node(id);
  const double lambda = tree.ConsistencyWeight(id);
  self.f_tilde = lambda * self.f_hat + (1.0 - lambda) * child_sum;
  return self.f_tilde;
}

}  // namespace

void ApplyTreeConsistency(DecompositionTree& tree) { Consolidate(tree, 0); }

DecompositionTree TreeConsistency(DecompositionTree tree) {
  ApplyTreeConsistency(tree);
  return tree;
}

void ApplyGridConsistency(GridSet& grids) {
  const GridSpec& spec = grids.spec();
  const int n = grids.num_grids();

  double mean_total = 0.0;
  for (int i = 0; i < n; ++i) {
    const FrequencyVector& f = grids.grid(i).freqs;
    double total = 0.0;
    for (double v : f) total += v;
    mean_total += total / n;
  }
  for (int i = 0; i < n; ++i) {
    FrequencyVector& f = grids.mutable_grid(i).freqs;
    double total = 0.0;
    for (double v : f) total += v;
    const double shift = (mean_total - total) / static_cast<double>(f.size());
    for (double& v : f) v += shift;
  }

  for (int attr = 0; attr < spec.d; ++attr) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (grids.grid(i).HasAttr(attr)) members.push_back(i);
    }
    for (int j = 0; j < spec.g2; ++j) {
      std::vector<std::vector<int>> cells(members.size());
      std::vector<double> sums(members.size(), 0.0);
      std::vector<double> weights(members.size(), 0.0);
      double num = 0.0;
      double den = 0.0;
      for (std::size_t m = 0; m < members.size(); ++m) {
        const Grid& g = grids.grid(members[m]);
        cells[m] = grids.FractionCells(members[m], attr, j);
        for (int c : cells[m]) sums[m] += g.freqs[c];
        // S = cells per fraction: g1/g2 for 1-D, g2 for 2-D.
        weights[m] = static_cast<double>(cells[m].size());
        num += sums[m] / weights[m];
        den += 1.0 / weights[m];
      }
      const double target = num / den;
      for (std::size_t m = 0; m < members.size(); ++m) {
        FrequencyVector& f = grids.mutable_grid(members[m]).freqs;
        const double add = (target - sums[m]) / weights[m];
        for (int c : cells[m]) f[c] += add;
      }
    }
  }
}

GridSet GridConsistency(GridSet grids) {
  ApplyGridConsistency(grids);
  return grids;
}

}  // namespace ldprq
