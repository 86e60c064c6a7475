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

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bayespc/cutset.hpp"
#include "bayespc/numerics.hpp"
#include "bayespc/types.hpp"

namespace bayespc {

enum class CircuitNodeKind { Sum, Product, Indicator, Bernoulli };

struct CircuitNode {
  CircuitNodeKind kind = CircuitNodeKind::Product;
  std::vector<std::size_t> inputs;
  std::vector<double> weights;  // Sum only, parallel to inputs
  int var = -1;                 // Indicator and Bernoulli
  int value = 0;                // Indicator: 1 iff x[var] == value
  double p = 0.5;               // Bernoulli: P(x[var] = 1)
};

/// Sum/product/leaf DAG over binary variables.
///
/// Nodes are stored in topological order: every input id is smaller than the
/// id of the node using it, and the last node is the root. Construction
/// rejects cycles, dangling nodes (a second sink), unnormalized sum weights
/// and malformed leaves, and computes the scope of every node.
class Circuit {
 public:
  explicit Circuit(std::vector<CircuitNode> nodes);

  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return nodes_.size() - 1; }
  const CircuitNode& node(std::size_t i) const { return nodes_[i]; }
  std::span<const CircuitNode> nodes() const { return nodes_; }
  /// Sorted variable ids the node depends on.
  std::span<const int> scope(std::size_t i) const { return scopes_[i]; }

 private:
  std::vector<CircuitNode> nodes_;
  std::vector<std::vector<int>> scopes_;
};

/// Appends nodes in topological order; the last node added becomes the root.
class CircuitBuilder {
 public:
  std::size_t add_sum(std::vector<std::size_t> inputs, std::vector<double> weights);
  std::size_t add_product(std::vector<std::size_t> inputs);
  std::size_t add_indicator(int var, int value);
  std::size_t add_bernoulli(int var, double p);
  Circuit finish() &&;

 private:
  std::vector<CircuitNode> nodes_;
};

/// Compiles a cutset network into a smooth, decomposable, deterministic
/// circuit. A decision on X becomes Sum_k w_k * ([X = k] x child_k); a tree
/// variable V with parent value u becomes Sum_x theta(x | u) * ([V = x] x
/// children given x). Nothing is shared between branches.
Circuit compile(const CutsetNetwork& net);

/// Log-value of every node for the assignment `x` (indexed by variable id).
std::vector<double> circuit_log_values(const Circuit& c, std::span<const std::uint8_t> x);

/// Log-value of the root.
LogScore circuit_log_density(const Circuit& c, std::span<const std::uint8_t> x);

/// Every sum's inputs have identical scopes.
bool check_smooth(const Circuit& c);

/// Every product's inputs have pairwise disjoint scopes.
bool check_decomposable(const Circuit& c);

/// For every assignment of the root scope, every sum has at most one input
/// with a strictly positive value. Throws std::invalid_argument if the root
/// scope has more than `max_variables` variables.
bool check_deterministic(const Circuit& c, std::size_t max_variables = 20);

/// As above, over the given assignments only.
bool check_deterministic(const Circuit& c, std::span<const Assignment> samples);

struct CircuitSize {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  /// k - 1 per sum with k inputs, 1 per Bernoulli leaf, 0 per indicator.
  std::size_t params = 0;
};

CircuitSize circuit_size(const Circuit& c);

/// The decisions followed by `x` from the root of `net` to its leaf, as
/// (node index, chosen branch) pairs in path order.
std::vector<std::pair<std::size_t, int>> induced_path(const CutsetNetwork& net,
                                                      std::span<const std::uint8_t> x);

/// One node per line in topological order:
///   <id> <SUM|PRODUCT|INDICATOR|BERNOULLI> <scope> <payload> <inputs>
/// scope and inputs are comma-separated ids; payload is the comma-separated
/// weights of a sum, `var=value` for an indicator, p for a Bernoulli leaf; an
/// empty field is written as `-`.
void write_circuit(std::ostream& out, const Circuit& c);

}  // namespace bayespc
