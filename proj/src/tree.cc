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

#include "ldprq/tree.h"

#include <stdexcept>

namespace ldprq {

DecompositionTree::DecompositionTree(int domain) : domain_(domain) {
  if (domain < 1) throw std::invalid_argument("tree domain must be positive");
  TreeNode root;
  root.interval = Interval{0, domain};
  root.f_hat = 1.0;
  root.f_tilde = 1.0;
  nodes_.push_back(root);
  layers_.push_back({0});
}

int DecompositionTree::AddChild(int parent, Interval interval) {
  if (parent < 0 || parent >= size()) throw std::out_of_range("bad parent node id");
  if (!nodes_[parent].interval.Covers(interval) || interval.length() <= 0) {
    throw std::invalid_argument("child interval must be a non-empty part of its parent");
  }
  TreeNode child;
  child.interval = interval;
  child.parent = parent;
  child.layer = nodes_[parent].layer + 1;
  const int id = size();
  nodes_.push_back(child);
  nodes_[parent].children.push_back(id);
  if (child.layer >= num_layers()) layers_.resize(child.layer + 1);
  layers_[child.layer].push_back(id);
  return id;
}

void DecompositionTree::set_fanout(int fanout) {
  if (fanout < 2) throw std::invalid_argument("fanout must be at least 2");
  fanout_ = fanout;
}

double DecompositionTree::ConsistencyWeight(int id) const {
  const TreeNode& n = node(id);
  double k = static_cast<double>(n.children.size());
  if (n.children.size() == 1 && nodes_[n.children[0]].interval == n.interval) k = fanout_;
  return k / (k + 1.0);
}

const std::vector<int>& DecompositionTree::Grow(std::span<const char> split, int fanout) {
  set_fanout(fanout);
  const std::vector<int> last = layers_.back();
  if (split.size() != last.size()) {
    throw std::invalid_argument("split flags must match the deepest layer");
  }
  for (std::size_t i = 0; i < last.size(); ++i) {
    const Interval iv = nodes_[last[i]].interval;
    if (split[i] && iv.length() >= fanout && iv.length() % fanout == 0) {
      const int step = iv.length() / fanout;
      for (int k = 0; k < fanout; ++k) {
        AddChild(last[i], Interval{iv.lo + k * step, iv.lo + (k + 1) * step});
      }
    } else {
      AddChild(last[i], iv);
    }
  }
  return layers_.back();
}

std::vector<int> DecompositionTree::LayerIndexOfValue(int t) const {
  std::vector<int> index(domain_, -1);
  const std::vector<int>& ids = layer(t);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Interval iv = nodes_[ids[i]].interval;
    for (int v = iv.lo; v < iv.hi; ++v) index[v] = static_cast<int>(i);
  }
  for (int v : index) {
    if (v < 0) throw std::logic_error("layer does not cover the domain");
  }
  return index;
}

bool operator==(const TreeNode& a, const TreeNode& b) {
  return a.interval == b.interval && a.f_hat == b.f_hat && a.f_tilde == b.f_tilde &&
         a.parent == b.parent && a.layer == b.layer && a.children == b.children;
}

bool operator==(const DecompositionTree& a, const DecompositionTree& b) {
  return a.domain_ == b.domain_ && a.fanout_ == b.fanout_ && a.nodes_ == b.nodes_ &&
         a.layers_ == b.layers_;
}

namespace {

void Cover(const DecompositionTree& tree, int id, Interval q, QueryCover& out) {
  const TreeNode& n = tree.node(id);
  if (!n.interval.Intersects(q)) return;
  if (q.Covers(n.interval)) {
    out.full.push_back(id);
    return;
  }
  if (n.is_leaf()) {
    out.partial.emplace_back(
        id, static_cast<double>(n.interval.OverlapLength(q)) / n.interval.length());
    return;
  }
  for (int child : n.children) Cover(tree, child, q, out);
}

void PushDown(const DecompositionTree& tree, int id, double c, std::vector<double>& coef) {
  const TreeNode& n = tree.node(id);
  if (n.is_leaf()) {
    coef[id] += c;
    return;
  }
  const double lambda = tree.ConsistencyWeight(id);
  coef[id] += lambda * c;
  for (int child : n.children) PushDown(tree, child, (1.0 - lambda) * c, coef);
}

}  // namespace

QueryCover DecomposeQuery(const DecompositionTree& tree, Interval q) {
  QueryCover cover;
  Cover(tree, 0, q, cover);
  return cover;
}

std::vector<int> QueryDecomposition(const DecompositionTree& tree, Interval q) {
  return DecomposeQuery(tree, q).full;
}

double EstimateQuery(const DecompositionTree& tree, Interval q) {
  const QueryCover cover = DecomposeQuery(tree, q);
  double total = 0.0;
  for (int id : cover.full) total += tree.node(id).f_tilde;
  for (const auto& [id, frac] : cover.partial) total += frac * tree.node(id).f_tilde;
  return total;
}

std::vector<double> TreeCoefficients(const DecompositionTree& tree, Interval q,
                                     bool include_partial_leaves) {
  std::vector<double> coef(tree.size(), 0.0);
  const QueryCover cover = DecomposeQuery(tree, q);
  for (int id : cover.full) PushDown(tree, id, 1.0, coef);
  if (include_partial_leaves) {
    for (const auto& [id, frac] : cover.partial) coef[id] += frac;
  }
  return coef;
}

}  // namespace ldprq
