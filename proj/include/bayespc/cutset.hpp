// Copyright 2026 The bayespc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "bayespc/chow_liu.hpp"
#include "bayespc/types.hpp"

namespace bayespc {

/// Conditions on `var`: branch k is taken when x[var] == k, with weight
/// weights[k].
struct DecisionNode {
  int var = 0;
  std::array<double, 2> weights{0.5, 0.5};
  std::array<std::size_t, 2> children{0, 0};
};

/// Chow-Liu tree over the variables not decided on the path to this leaf.
struct LeafNode {
  ChowLiuTree tree;
};

using CnetNode = std::variant<DecisionNode, LeafNode>;

/// Cutset network: a binary decision tree over variables whose leaves are
/// Chow-Liu trees. Nodes live in a flat vector and refer to their children
/// by index.
///
/// Invariants, checked on construction: the nodes reachable from the root
/// form a tree that uses every node exactly once; no root-to-leaf path tests
/// a variable twice; every leaf's scope is the root scope minus the path's
/// decided variables and is nonempty; decision weights are nonnegative and
/// sum to 1 within 1e-12.
class CutsetNetwork {
 public:
  /// A network that is just one leaf.
  explicit CutsetNetwork(ChowLiuTree leaf);

  CutsetNetwork(std::vector<int> scope, std::vector<CnetNode> nodes, std::size_t root);

  std::span<const int> scope() const { return scope_; }
  /// Largest variable id + 1; the length of a full assignment vector.
  std::size_t id_bound() const { return static_cast<std::size_t>(scope_.back()) + 1; }
  std::size_t root() const { return root_; }
  const CnetNode& node(std::size_t i) const { return nodes_[i]; }
  std::span<const CnetNode> nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t decision_count() const;
  std::size_t leaf_count() const { return node_count() - decision_count(); }
  bool is_leaf(std::size_t i) const { return std::holds_alternative<LeafNode>(nodes_[i]); }

  /// Replaces leaf `leaf` by a decision on `var` with the two given child
  /// leaves. Returns the indices of the new leaves. Throws
  /// std::invalid_argument if the pieces do not fit.
  std::array<std::size_t, 2> split_leaf(std::size_t leaf, int var, std::array<double, 2> weights,
                                        ChowLiuTree child0, ChowLiuTree child1);

  /// Copy of this network with `leaf` split as in split_leaf.
  CutsetNetwork with_cut(std::size_t leaf, int var, std::array<double, 2> weights, ChowLiuTree child0,
                         ChowLiuTree child1) const;

 private:
  void validate() const;

  std::vector<int> scope_;
  std::vector<CnetNode> nodes_;
  std::size_t root_ = 0;
};

/// ln p(x): path log-weights plus the reached leaf's log-density. `x` is
/// indexed by global variable id and must cover the scope.
LogScore cnet_log_density(const CutsetNetwork& net, std::span<const std::uint8_t> x);

/// sum_rows w * ln p(row). `d` must be over exactly the network's scope.
LogScore cnet_log_likelihood(const CutsetNetwork& net, const WeightedDataset& d);

/// Ancestral sample indexed by global variable id.
Assignment cnet_sample(const CutsetNetwork& net, Rng& rng);

/// Approximate MPE: observed decision variables are followed; at unobserved
/// ones the branch maximizing ln w_k + (child MPE value) wins, ties to branch
/// 0; leaves are decoded exactly. The returned score is the log-density of the
/// returned assignment. Throws std::invalid_argument on evidence outside the
/// scope.
MpeResult cnet_mpe(const CutsetNetwork& net, const Evidence& evidence);

}  // namespace bayespc
