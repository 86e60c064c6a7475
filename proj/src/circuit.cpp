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

#include "bayespc/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bayespc {

namespace {

constexpr double kWeightTolerance = 1e-12;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Range>
std::string join(const Range& values) {
  if (values.empty()) return "-";
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out.push_back(',');
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += format_double(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

class Compiler {
 public:
  explicit Compiler(const CutsetNetwork& net) : net_(net) {}

  Circuit run() && {
    compile_node(net_.root());
    return std::move(builder_).finish();
  }

 private:
  std::size_t compile_node(std::size_t index) {
    if (const auto* leaf = std::get_if<LeafNode>(&net_.node(index))) {
      family_cache_.assign(leaf->tree.size(), {kNone, kNone});
      return compile_family(leaf->tree, leaf->tree.root(), 0);
    }
    const auto& dec = std::get<DecisionNode>(net_.node(index));
    std::vector<std::size_t> branches;
    for (int k = 0; k < 2; ++k) {
      const std::size_t child = compile_node(dec.children[k]);
      const std::size_t indicator = builder_.add_indicator(dec.var, k);
      branches.push_back(builder_.add_product({indicator, child}));
    }
    return builder_.add_sum(std::move(branches), {dec.weights[0], dec.weights[1]});
  }

  // Distribution of v's subtree given that v's parent takes value u. The
  // result depends only on (v, u), so both values of the grandparent share it.
  std::size_t compile_family(const ChowLiuTree& t, std::size_t v, int u) {
    std::size_t& cached = family_cache_[v][t.parent(v) < 0 ? 0 : u];
    if (cached != kNone) return cached;
    std::vector<std::size_t> inputs;
    for (int x = 0; x < 2; ++x) {
      std::vector<std::size_t> parts;
      for (std::size_t c : t.children(v)) parts.push_back(compile_family(t, c, x));
      const std::size_t indicator = builder_.add_indicator(t.variable_id(v), x);
      if (parts.empty()) {
        inputs.push_back(indicator);
      } else {
        parts.insert(parts.begin(), indicator);
        inputs.push_back(builder_.add_product(std::move(parts)));
      }
    }
    const auto& row = t.rows(v)[t.parent(v) < 0 ? 0 : u];
    cached = builder_.add_sum(std::move(inputs), {row[0], row[1]});
    return cached;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  const CutsetNetwork& net_;
  CircuitBuilder builder_;
  std::vector<std::array<std::size_t, 2>> family_cache_;
};

bool deterministic_at(const Circuit& c, std::span<const std::uint8_t> x) {
  const std::vector<double> values = circuit_log_values(c, x);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    if (n.kind != CircuitNodeKind::Sum) continue;
    const auto positive = std::count_if(n.inputs.begin(), n.inputs.end(),
                                        [&](std::size_t in) { return values[in] > kLogZero; });
    if (positive > 1) return false;
  }
  return true;
}

}  // namespace

Circuit::Circuit(std::vector<CircuitNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("Circuit: no nodes");
  std::vector<bool> used(nodes_.size(), false);
  scopes_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const CircuitNode& n = nodes_[i];
    const std::string where = "Circuit: node " + std::to_string(i) + ": ";
    switch (n.kind) {
      case CircuitNodeKind::Indicator:
      case CircuitNodeKind::Bernoulli:
        if (!n.inputs.empty() || n.var < 0) throw std::invalid_argument(where + "malformed leaf");
        if (n.kind == CircuitNodeKind::Indicator && n.value != 0 && n.value != 1) {
          throw std::invalid_argument(where + "indicator value must be 0 or 1");
        }
        if (n.kind == CircuitNodeKind::Bernoulli && !(n.p >= 0.0 && n.p <= 1.0)) {
          throw std::invalid_argument(where + "Bernoulli parameter outside [0, 1]");
        }
        scopes_[i] = {n.var};
        break;
      case CircuitNodeKind::Sum:
      case CircuitNodeKind::Product: {
        if (n.inputs.empty()) throw std::invalid_argument(where + "no inputs");
        if (n.kind == CircuitNodeKind::Sum) {
          if (n.weights.size() != n.inputs.size()) {
            throw std::invalid_argument(where + "one weight per input required");
          }
          double total = 0.0;
          for (double w : n.weights) {
            if (!(w >= 0.0)) throw std::invalid_argument(where + "negative weight");
            total += w;
          }
          if (std::abs(total - 1.0) > kWeightTolerance) {
            throw std::invalid_argument(where + "weights do not sum to 1");
          }
        }
        std::vector<int> scope;
        for (std::size_t in : n.inputs) {
          if (in >= i) throw std::invalid_argument(where + "inputs must precede the node");
          used[in] = true;
          std::vector<int> merged;
          std::set_union(scope.begin(), scope.end(), scopes_[in].begin(), scopes_[in].end(),
                         std::back_inserter(merged));
          scope = std::move(merged);
        }
        scopes_[i] = std::move(scope);
        break;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!used[i]) throw std::invalid_argument("Circuit: node " + std::to_string(i) + " is a second root");
  }
}

std::size_t CircuitBuilder::add_sum(std::vector<std::size_t> inputs, std::vector<double> weights) {
  CircuitNode n;
  n.kind = CircuitNodeKind::Sum;
  n.inputs = std::move(inputs);
  n.weights = std::move(weights);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t CircuitBuilder::add_product(std::vector<std::size_t> inputs) {
  CircuitNode n;
  n.kind = CircuitNodeKind::Product;
  n.inputs = std::move(inputs);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t CircuitBuilder::add_indicator(int var, int value) {
  CircuitNode n;
  n.kind = CircuitNodeKind::Indicator;
  n.var = var;
  n.value = value;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t CircuitBuilder::add_bernoulli(int var, double p) {
  CircuitNode n;
  n.kind = CircuitNodeKind::Bernoulli;
  n.var = var;
  n.p = p;
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

Circuit CircuitBuilder::finish() && { return Circuit(std::move(nodes_)); }

Circuit compile(const CutsetNetwork& net) { return Compiler(net).run(); }

std::vector<double> circuit_log_values(const Circuit& c, std::span<const std::uint8_t> x) {
  const auto& root_scope = c.scope(c.root());
  if (!root_scope.empty() && x.size() <= static_cast<std::size_t>(root_scope.back())) {
    throw std::invalid_argument("circuit_log_values: assignment too short");
  }
  std::vector<double> values(c.size());
  std::vector<double> terms;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    switch (n.kind) {
      case CircuitNodeKind::Indicator:
        values[i] = x[n.var] == n.value ? 0.0 : kLogZero;
        break;
      case CircuitNodeKind::Bernoulli:
        values[i] = std::log(x[n.var] ? n.p : 1.0 - n.p);
        break;
      case CircuitNodeKind::Product: {
        double s = 0.0;
        for (std::size_t in : n.inputs) s += values[in];
        values[i] = s;
        break;
      }
      case CircuitNodeKind::Sum:
        terms.clear();
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          const double v = values[n.inputs[k]];
          terms.push_back(v == kLogZero ? kLogZero : std::log(n.weights[k]) + v);
        }
        values[i] = log_sum_exp(terms);
        break;
    }
  }
  return values;
}

LogScore circuit_log_density(const Circuit& c, std::span<const std::uint8_t> x) {
  return circuit_log_values(c, x).back();
}

bool check_smooth(const Circuit& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    if (n.kind != CircuitNodeKind::Sum) continue;
    const auto first = c.scope(n.inputs.front());
    for (std::size_t in : n.inputs) {
      const auto s = c.scope(in);
      if (!std::equal(s.begin(), s.end(), first.begin(), first.end())) return false;
    }
  }
  return true;
}

bool check_decomposable(const Circuit& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    if (n.kind != CircuitNodeKind::Product) continue;
    std::size_t total = 0;
    for (std::size_t in : n.inputs) total += c.scope(in).size();
    // Inputs are disjoint iff their sizes add up to the size of the union.
    if (total != c.scope(i).size()) return false;
  }
  return true;
}

bool check_deterministic(const Circuit& c, std::size_t max_variables) {
  const auto scope = c.scope(c.root());
  if (scope.size() > max_variables) {
    throw std::invalid_argument("check_deterministic: " + std::to_string(scope.size()) +
                                " variables is too many for exhaustive enumeration");
  }
  std::vector<std::uint8_t> x(scope.empty() ? 0 : static_cast<std::size_t>(scope.back()) + 1, 0);
  const std::uint64_t count = std::uint64_t{1} << scope.size();
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    for (std::size_t k = 0; k < scope.size(); ++k) x[scope[k]] = (bits >> k) & 1U;
    if (!deterministic_at(c, x)) return false;
  }
  return true;
}

bool check_deterministic(const Circuit& c, std::span<const Assignment> samples) {
  return std::all_of(samples.begin(), samples.end(),
                     [&](const Assignment& x) { return deterministic_at(c, x); });
}

CircuitSize circuit_size(const Circuit& c) {
  CircuitSize size;
  size.nodes = c.size();
  for (const CircuitNode& n : c.nodes()) {
    size.edges += n.inputs.size();
    if (n.kind == CircuitNodeKind::Sum) size.params += n.inputs.size() - 1;
    if (n.kind == CircuitNodeKind::Bernoulli) size.params += 1;
  }
  return size;
}

std::vector<std::pair<std::size_t, int>> induced_path(const CutsetNetwork& net,
                                                      std::span<const std::uint8_t> x) {
  if (x.size() < net.id_bound()) throw std::invalid_argument("induced_path: incomplete assignment");
  std::vector<std::pair<std::size_t, int>> path;
  std::size_t index = net.root();
  while (const auto* dec = std::get_if<DecisionNode>(&net.node(index))) {
    const int k = x[dec->var];
    if (k != 0 && k != 1) throw std::invalid_argument("induced_path: values must be 0 or 1");
    path.emplace_back(index, k);
    index = dec->children[k];
  }
  return path;
}

void write_circuit(std::ostream& out, const Circuit& c) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    const CircuitNode& n = c.node(i);
    out << i << ' ';
    switch (n.kind) {
      case CircuitNodeKind::Sum:
        out << "SUM " << join(c.scope(i)) << ' ' << join(n.weights);
        break;
      case CircuitNodeKind::Product:
        out << "PRODUCT " << join(c.scope(i)) << " -";
        break;
      case CircuitNodeKind::Indicator:
        out << "INDICATOR " << join(c.scope(i)) << ' ' << n.var << '=' << n.value;
        break;
      case CircuitNodeKind::Bernoulli:
        out << "BERNOULLI " << join(c.scope(i)) << ' ' << format_double(n.p);
        break;
    }
    out << ' ' << join(n.inputs) << '\n';
  }
}

}  // namespace bayespc
