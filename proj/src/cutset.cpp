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

#include "bayespc/cutset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bayespc {

namespace {

constexpr double kWeightTolerance = 1e-12;

void check_weights(const std::array<double, 2>& w) {
  if (!(w[0] >= 0.0 && w[1] >= 0.0) || std::abs(w[0] + w[1] - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("CutsetNetwork: decision weights must be nonnegative and sum to 1");
  }
}

std::vector<int> without(std::span<const int> scope, int var) {
  std::vector<int> out;
  for (int v : scope) {
    if (v != var) out.push_back(v);
  }
  return out;
}

void check_evidence(const CutsetNetwork& net, const Evidence& evidence) {
  for (std::size_t var = 0; var < evidence.size(); ++var) {
    if (evidence[var] == kUnobserved) continue;
    if (evidence[var] != 0 && evidence[var] != 1) {
      throw std::invalid_argument("cnet_mpe: evidence values must be 0, 1 or unobserved");
    }
    if (!std::binary_search(net.scope().begin(), net.scope().end(), static_cast<int>(var))) {
      throw std::invalid_argument("cnet_mpe: evidence on variable " + std::to_string(var) +
                                  " outside the network scope");
    }
  }
}

// Decodes the subtree at `index` into x and returns its max-product value.
double mpe_node(const CutsetNetwork& net, std::size_t index, const Evidence& evidence,
                std::span<std::uint8_t> x) {
  if (const auto* leaf = std::get_if<LeafNode>(&net.node(index))) {
    return clt_mpe_into(leaf->tree, evidence, x);
  }
  const auto& dec = std::get<DecisionNode>(net.node(index));
  if (observed(evidence, dec.var)) {
    const int k = evidence[dec.var];
    x[dec.var] = static_cast<std::uint8_t>(k);
    return std::log(dec.weights[k]) + mpe_node(net, dec.children[k], evidence, x);
  }
  Assignment branch1(x.begin(), x.end());
  const double v0 = std::log(dec.weights[0]) + mpe_node(net, dec.children[0], evidence, x);
  const double v1 = std::log(dec.weights[1]) + mpe_node(net, dec.children[1], evidence, branch1);
  if (v1 > v0) {
    std::copy(branch1.begin(), branch1.end(), x.begin());
    x[dec.var] = 1;
    return v1;
  }
  x[dec.var] = 0;
  return v0;
}

}  // namespace

CutsetNetwork::CutsetNetwork(ChowLiuTree leaf)
    : scope_(leaf.variable_ids().begin(), leaf.variable_ids().end()) {
  nodes_.emplace_back(LeafNode{std::move(leaf)});
}

CutsetNetwork::CutsetNetwork(std::vector<int> scope, std::vector<CnetNode> nodes, std::size_t root)
    : scope_(std::move(scope)), nodes_(std::move(nodes)), root_(root) {
  validate();
}

std::size_t CutsetNetwork::decision_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const CnetNode& n) {
    return std::holds_alternative<DecisionNode>(n);
  }));
}

void CutsetNetwork::validate() const {
  if (scope_.empty()) throw std::invalid_argument("CutsetNetwork: empty scope");
  for (std::size_t i = 1; i < scope_.size(); ++i) {
    if (scope_[i - 1] >= scope_[i]) {
      throw std::invalid_argument("CutsetNetwork: scope must be distinct and ascending");
    }
  }
  if (root_ >= nodes_.size()) throw std::invalid_argument("CutsetNetwork: root out of range");
  std::vector<bool> seen(nodes_.size(), false);
  struct Frame {
    std::size_t index;
    std::vector<int> remaining;
  };
  std::vector<Frame> stack{{root_, scope_}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.index >= nodes_.size()) throw std::invalid_argument("CutsetNetwork: child index out of range");
    if (seen[f.index]) throw std::invalid_argument("CutsetNetwork: node reached twice");
    seen[f.index] = true;
    if (const auto* leaf = std::get_if<LeafNode>(&nodes_[f.index])) {
      if (!std::equal(leaf->tree.variable_ids().begin(), leaf->tree.variable_ids().end(),
                      f.remaining.begin(), f.remaining.end())) {
        throw std::invalid_argument("CutsetNetwork: leaf " + std::to_string(f.index) +
                                    " scope is not the undecided variables");
      }
      continue;
    }
    const auto& dec = std::get<DecisionNode>(nodes_[f.index]);
    if (!std::binary_search(f.remaining.begin(), f.remaining.end(), dec.var)) {
      throw std::invalid_argument("CutsetNetwork: decision variable " + std::to_string(dec.var) +
                                  " already decided or outside the scope");
    }
    check_weights(dec.weights);
    std::vector<int> rest = without(f.remaining, dec.var);
    if (rest.empty()) throw std::invalid_argument("CutsetNetwork: decision leaves an empty leaf scope");
    stack.push_back({dec.children[1], rest});
    stack.push_back({dec.children[0], std::move(rest)});
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw std::invalid_argument("CutsetNetwork: unreachable node");
  }
}

std::array<std::size_t, 2> CutsetNetwork::split_leaf(std::size_t leaf, int var,
                                                     std::array<double, 2> weights,
                                                     ChowLiuTree child0, ChowLiuTree child1) {
  if (leaf >= nodes_.size() || !is_leaf(leaf)) throw std::invalid_argument("split_leaf: not a leaf");
  check_weights(weights);
  const ChowLiuTree& tree = std::get<LeafNode>(nodes_[leaf]).tree;
  if (!std::binary_search(tree.variable_ids().begin(), tree.variable_ids().end(), var)) {
    throw std::invalid_argument("split_leaf: variable not in the leaf scope");
  }
  const std::vector<int> rest = without(tree.variable_ids(), var);
  for (const ChowLiuTree* c : {&child0, &child1}) {
    if (!std::equal(rest.begin(), rest.end(), c->variable_ids().begin(), c->variable_ids().end())) {
      throw std::invalid_argument("split_leaf: child scope must be the leaf scope minus the variable");
    }
  }
  const std::array<std::size_t, 2> children{nodes_.size(), nodes_.size() + 1};
  nodes_.emplace_back(LeafNode{std::move(child0)});
  nodes_.emplace_back(LeafNode{std::move(child1)});
  nodes_[leaf] = DecisionNode{var, weights, children};
  return children;
}

CutsetNetwork CutsetNetwork::with_cut(std::size_t leaf, int var, std::array<double, 2> weights,
                                      ChowLiuTree child0, ChowLiuTree child1) const {
  CutsetNetwork copy = *this;
  copy.split_leaf(leaf, var, weights, std::move(child0), std::move(child1));
  return copy;
}

LogScore cnet_log_density(const CutsetNetwork& net, std::span<const std::uint8_t> x) {
  if (x.size() < net.id_bound()) throw std::invalid_argument("cnet_log_density: assignment too short");
  double lp = 0.0;
  std::size_t index = net.root();
  while (const auto* dec = std::get_if<DecisionNode>(&net.node(index))) {
    const int k = x[dec->var];
    lp += std::log(dec->weights[k]);
    index = dec->children[k];
  }
  return lp + clt_log_density(std::get<LeafNode>(net.node(index)).tree, x);
}

LogScore cnet_log_likelihood(const CutsetNetwork& net, const WeightedDataset& d) {
  if (!std::equal(net.scope().begin(), net.scope().end(), d.variable_ids().begin(),
                  d.variable_ids().end())) {
    throw std::invalid_argument("cnet_log_likelihood: dataset variables differ from the network scope");
  }
  double ll = 0.0;
  Assignment x(net.id_bound(), 0);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double w = d.weight(r);
    if (w == 0.0) continue;
    auto row = d.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) x[d.variable_ids()[c]] = row[c];
    ll += w * cnet_log_density(net, x);
  }
  return ll;
}

Assignment cnet_sample(const CutsetNetwork& net, Rng& rng) {
  Assignment x(net.id_bound(), 0);
  std::size_t index = net.root();
  while (const auto* dec = std::get_if<DecisionNode>(&net.node(index))) {
    const int k = uniform01(rng) < dec->weights[0] ? 0 : 1;
    x[dec->var] = static_cast<std::uint8_t>(k);
    index = dec->children[k];
  }
  clt_sample_into(std::get<LeafNode>(net.node(index)).tree, rng, x);
  return x;
}

MpeResult cnet_mpe(const CutsetNetwork& net, const Evidence& evidence) {
  check_evidence(net, evidence);
  MpeResult result;
  result.assignment.assign(net.id_bound(), 0);
  mpe_node(net, net.root(), evidence, result.assignment);
  result.log_density = cnet_log_density(net, result.assignment);
  return result;
}

}  // namespace bayespc
