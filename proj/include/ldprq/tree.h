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

// Interval decomposition tree over a 1-D domain [0, c).
//
// Nodes live in a flat arena; node 0 is the root. Every layer built with
// Grow() partitions the domain: a node that is not split gets one child
// carrying the same interval, so the last layer always holds the leaves.

#ifndef LDPRQ_TREE_H_
#define LDPRQ_TREE_H_

#include <span>
#include <utility>
#include <vector>

#include "ldprq/types.h"

namespace ldprq {

struct TreeNode {
  Interval interval;
  double f_hat = 0.0;    // after Norm-Sub, before consistency
  double f_tilde = 0.0;  // after consistency
  int parent = -1;
  int layer = 0;
  std::vector<int> children;

  bool is_leaf() const { return children.empty(); }
};

class DecompositionTree {
 public:
  DecompositionTree() : DecompositionTree(1) {}
  // Root covers [0, domain) with f_hat = f_tilde = 1.
  explicit DecompositionTree(int domain);

  int domain() const { return domain_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int num_layers() const { return static_cast<int>(layers_.size()); }

  const TreeNode& node(int id) const { return nodes_.at(id); }
  TreeNode& mutable_node(int id) { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<int>& layer(int t) const { return layers_.at(t); }

  // Appends a child to `parent`. The caller keeps children's intervals a
  // partition of the parent's. Returns the new node id.
  int AddChild(int parent, Interval interval);

  // Extends the deepest layer: node i of that layer is cut into `fanout`
  // equal children when split[i] is true (and its length allows it), and
  // otherwise gets a single copy child. Returns the new layer's node ids.
  const std::vector<int>& Grow(std::span<const char> split, int fanout);

  // Fanout of the last Grow() call (2 until then).
  int fanout() const { return fanout_; }
  void set_fanout(int fanout);

  // Weight lambda = k / (k + 1) a node keeps in the parent-child average.
  // A copy child re-estimates the same range, so it counts as a split into
  // fanout() parts: every node of a layer then shares one lambda, and each
  // layer's consistent frequencies keep the layer's total.
  double ConsistencyWeight(int id) const;

  // For each value in [0, domain), the index within layer t of the node
  // holding it.
  std::vector<int> LayerIndexOfValue(int t) const;

  friend bool operator==(const DecompositionTree&, const DecompositionTree&);

 private:
  int domain_ = 1;
  int fanout_ = 2;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<int>> layers_;
};

bool operator==(const TreeNode& a, const TreeNode& b);

struct QueryCover {
  // Highest nodes whose interval lies inside the query.
  std::vector<int> full;
  // Leaves straddling a query endpoint, with the overlapped fraction.
  std::vector<std::pair<int, double>> partial;
};

QueryCover DecomposeQuery(const DecompositionTree& tree, Interval q);

// Nodes used for q: inside q while the parent is not.
std::vector<int> QueryDecomposition(const DecompositionTree& tree, Interval q);

// Sum of f_tilde over the cover; straddling leaves contribute in proportion
// to their overlap.
double EstimateQuery(const DecompositionTree& tree, Interval q);

// Weight of each node's f_hat in EstimateQuery after consistency. Seeds the
// fully covered nodes with 1 (and, if requested, straddling leaves with their
// overlap fraction), then pushes weight down: an internal node keeps
// lambda * c and hands (1 - lambda) * c to each child.
std::vector<double> TreeCoefficients(const DecompositionTree& tree, Interval q,
                                     bool include_partial_leaves = false);

}  // namespace ldprq

#endif  // LDPRQ_TREE_H_
