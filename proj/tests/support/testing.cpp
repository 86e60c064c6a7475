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

#include "testing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "bayespc/numerics.hpp"

namespace bayespc::testing {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Decodes a Prüfer sequence over labels 0..n-1 into n-1 edges.
std::vector<std::pair<int, int>> prufer_edges(std::span<const int> seq, int n) {
  std::vector<int> degree(n, 1);
  for (int s : seq) ++degree[s];
  std::vector<std::pair<int, int>> edges;
  for (int s : seq) {
    int leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(leaf, s);
    --degree[leaf];
    --degree[s];
  }
  int u = -1;
  for (int v = 0; v < n; ++v) {
    if (degree[v] == 1) {
      if (u < 0) {
        u = v;
      } else {
        edges.emplace_back(u, v);
      }
    }
  }
  return edges;
}

ChowLiuTree::Row random_row(Rng& rng, bool extreme) {
  if (extreme && uniform01(rng) < 0.2) {
    return uniform01(rng) < 0.5 ? ChowLiuTree::Row{1.0, 0.0} : ChowLiuTree::Row{0.0, 1.0};
  }
  const double p = uniform01(rng);
  return {1.0 - p, p};
}

}  // namespace

WeightedDataset random_dataset(Rng& rng, std::size_t rows, std::size_t cols, double p) {
  std::vector<std::uint8_t> cells(rows * cols);
  for (auto& c : cells) c = uniform01(rng) < p ? 1 : 0;
  std::vector<int> ids(cols);
  for (std::size_t i = 0; i < cols; ++i) ids[i] = static_cast<int>(i);
  return {std::move(cells), std::move(ids), std::vector<double>(rows, 1.0)};
}

WeightedDataset independent_dataset(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<double> p(cols);
  for (auto& q : p) q = 0.1 + 0.8 * uniform01(rng);
  std::vector<std::uint8_t> cells(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) cells[r * cols + c] = uniform01(rng) < p[c] ? 1 : 0;
  }
  std::vector<int> ids(cols);
  for (std::size_t i = 0; i < cols; ++i) ids[i] = static_cast<int>(i);
  return {std::move(cells), std::move(ids), std::vector<double>(rows, 1.0)};
}

ChowLiuTree random_tree(Rng& rng, std::vector<int> variable_ids, bool extreme) {
  const int n = static_cast<int>(variable_ids.size());
  std::vector<std::vector<int>> adj(n);
  if (n >= 2) {
    std::vector<int> seq(n - 2);
    for (auto& s : seq) s = static_cast<int>(uniform_index(rng, n));
    for (auto [a, b] : prufer_edges(seq, n)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  std::vector<int> parents(n, -2);
  const int root = static_cast<int>(uniform_index(rng, n));
  parents[root] = -1;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (parents[w] == -2) {
        parents[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<std::vector<ChowLiuTree::Row>> cpt(n);
  for (int v = 0; v < n; ++v) {
    const int rows = parents[v] < 0 ? 1 : 2;
    for (int u = 0; u < rows; ++u) cpt[v].push_back(random_row(rng, extreme));
  }
  return {std::move(variable_ids), std::move(parents), std::move(cpt)};
}

CutsetNetwork random_cnet(Rng& rng, std::size_t d, std::size_t max_decisions, bool extreme) {
  std::vector<int> all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = static_cast<int>(i);
  CutsetNetwork net(random_tree(rng, all, extreme));
  for (std::size_t step = 0; step < max_decisions; ++step) {
    std::vector<std::size_t> splittable;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      if (net.is_leaf(i) && std::get<LeafNode>(net.node(i)).tree.size() >= 2) splittable.push_back(i);
    }
    if (splittable.empty()) break;
    const std::size_t leaf = splittable[uniform_index(rng, splittable.size())];
    const auto scope = std::get<LeafNode>(net.node(leaf)).tree.variable_ids();
    const int var = scope[uniform_index(rng, scope.size())];
    std::vector<int> rest;
    for (int v : scope) {
      if (v != var) rest.push_back(v);
    }
    double w0 = uniform01(rng);
    if (extreme && uniform01(rng) < 0.2) w0 = uniform01(rng) < 0.5 ? 0.0 : 1.0;
    net.split_leaf(leaf, var, {w0, 1.0 - w0}, random_tree(rng, rest, extreme), random_tree(rng, rest, extreme));
  }
  return net;
}

WeightedDataset sample_dataset(const CutsetNetwork& net, Rng& rng, std::size_t rows) {
  const auto scope = net.scope();
  std::vector<std::uint8_t> cells;
  cells.reserve(rows * scope.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const Assignment x = cnet_sample(net, rng);
    for (int v : scope) cells.push_back(x[v]);
  }
  return {std::move(cells), std::vector<int>(scope.begin(), scope.end()), std::vector<double>(rows, 1.0)};
}

CutsetNetwork two_regime_generator(std::size_t d) {
  if (d < 3) throw std::invalid_argument("two_regime_generator: d must be at least 3");
  std::vector<int> rest;
  for (std::size_t i = 1; i < d; ++i) rest.push_back(static_cast<int>(i));
  const std::size_t m = rest.size();

  std::vector<int> chain_parents(m);
  std::vector<std::vector<ChowLiuTree::Row>> chain_cpt(m);
  for (std::size_t v = 0; v < m; ++v) {
    chain_parents[v] = static_cast<int>(v) - 1;
    chain_cpt[v] = v == 0 ? std::vector<ChowLiuTree::Row>{{0.3, 0.7}}
                          : std::vector<ChowLiuTree::Row>{{0.9, 0.1}, {0.1, 0.9}};
  }
  std::vector<int> star_parents(m, 0);
  std::vector<std::vector<ChowLiuTree::Row>> star_cpt(m);
  star_parents[0] = -1;
  star_cpt[0] = {{0.8, 0.2}};
  for (std::size_t v = 1; v < m; ++v) star_cpt[v] = {{0.15, 0.85}, {0.85, 0.15}};

  CutsetNetwork net(ChowLiuTree::with_uniform_rows(
      [&] {
        std::vector<int> all(d);
        for (std::size_t i = 0; i < d; ++i) all[i] = static_cast<int>(i);
        return all;
      }(),
      [&] {
        std::vector<int> p(d, 0);
        p[0] = -1;
        return p;
      }()));
  net.split_leaf(0, 0, {0.5, 0.5}, ChowLiuTree(rest, chain_parents, chain_cpt),
                 ChowLiuTree(rest, star_parents, star_cpt));
  return net;
}

std::vector<Assignment> all_assignments(std::span<const int> scope, std::size_t bound) {
  const std::size_t n = scope.size();
  std::vector<Assignment> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Assignment x(bound, 0);
    for (std::size_t i = 0; i < n; ++i) x[scope[i]] = static_cast<std::uint8_t>((m >> (n - 1 - i)) & 1u);
    out.push_back(std::move(x));
  }
  return out;
}

double exact_entropy(const CutsetNetwork& net) {
  double h = 0.0;
  for (const Assignment& x : all_assignments(net.scope(), net.id_bound())) {
    const double lp = cnet_log_density(net, x);
    if (lp > kLogZero) h -= std::exp(lp) * lp;
  }
  return h;
}

long double lgamma_series(long double x) {
  if (!(x > 0)) throw std::domain_error("lgamma_series: x must be positive");
  const long double pi = std::numbers::pi_v<long double>;
  long double shift = 0;
  while (x < 40) {
    shift -= std::log(x);
    x += 1;
  }
  long double sum = (x - 0.5L) * std::log(x) - x + 0.5L * std::log(2 * pi);
  long double factorial = 1;  // (2k)!
  long double two_pi_pow = 1;  // (2π)^(2k)
  long double x_pow = x;      // x^(2k-1)
  for (int k = 1; k <= 50; ++k) {
    factorial *= static_cast<long double>(2 * k - 1) * (2 * k);
    two_pi_pow *= 4 * pi * pi;
    if (k > 1) x_pow *= x * x;
    const int s = 2 * k;
    long double zeta = 0;
    const int terms = 2000;
    for (int n = terms; n >= 1; --n) zeta += std::pow(static_cast<long double>(n), -s);
    const long double big_n = terms;
    zeta += std::pow(big_n, 1 - s) / (s - 1) - std::pow(big_n, -s) / 2 + s * std::pow(big_n, -s - 1) / 12;
    const long double bernoulli = (k % 2 == 1 ? 2 : -2) * factorial * zeta / two_pi_pow;
    const long double term = bernoulli / (static_cast<long double>(s) * (s - 1) * x_pow);
    sum += term;
    if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
  }
  return sum + shift;
}

double prequential_log_marginal(const CutsetNetwork& net, const WeightedDataset& d, double alpha,
                                std::span<const std::size_t> order) {
  std::map<std::size_t, std::array<double, 2>> decision_counts;
  // (node, local variable, parent value) -> counts of x = 0, 1
  std::map<std::tuple<std::size_t, std::size_t, int>, std::array<double, 2>> leaf_counts;
  double total = 0.0;
  for (std::size_t r : order) {
    if (d.weight(r) != 1.0) throw std::invalid_argument("prequential_log_marginal: unit weights only");
    const Assignment x = d.assignment(r);
    std::size_t node = net.root();
    while (!net.is_leaf(node)) {
      const auto& dec = std::get<DecisionNode>(net.node(node));
      const int k = x[dec.var];
      auto& c = decision_counts[node];
      total += std::log((alpha / 2 + c[k]) / (alpha + c[0] + c[1]));
      c[k] += 1.0;
      node = dec.children[k];
    }
    const ChowLiuTree& t = std::get<LeafNode>(net.node(node)).tree;
    for (std::size_t v = 0; v < t.size(); ++v) {
      const int u = t.parent(v) < 0 ? 0 : x[t.variable_id(t.parent(v))];
      const int xv = x[t.variable_id(v)];
      auto& c = leaf_counts[{node, v, u}];
      total += std::log((alpha / 2 + c[xv]) / (alpha + c[0] + c[1]));
      c[xv] += 1.0;
    }
  }
  return total;
}

double reference_mi(const WeightedDataset& d, std::size_t ci, std::size_t cj) {
  double t[2][2] = {{0, 0}, {0, 0}};
  double n = 0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    t[d.at(r, ci)][d.at(r, cj)] += d.weight(r);
    n += d.weight(r);
  }
  double mi = 0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (t[a][b] == 0) continue;
      const double pab = t[a][b] / n;
      const double pa = (t[a][0] + t[a][1]) / n;
      const double pb = (t[0][b] + t[1][b]) / n;
      mi += pab * std::log(pab / (pa * pb));
    }
  }
  return std::max(mi, 0.0);
}

double brute_force_max_tree_weight(const WeightedDataset& d) {
  const int n = static_cast<int>(d.cols());
  if (n < 2) return 0.0;
  std::vector<std::vector<double>> mi(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) mi[i][j] = mi[j][i] = reference_mi(d, i, j);
  }
  std::vector<int> seq(n - 2, 0);
  double best = -1.0;
  while (true) {
    double w = 0.0;
    for (auto [a, b] : prufer_edges(seq, n)) w += mi[a][b];
    best = std::max(best, w);
    std::size_t pos = 0;
    while (pos < seq.size() && ++seq[pos] == n) seq[pos++] = 0;
    if (pos == seq.size()) break;
  }
  return best;
}

CircuitSize traverse_size(const Circuit& c) {
  std::vector<bool> seen(c.size(), false);
  std::vector<std::size_t> stack{c.root()};
  seen[c.root()] = true;
  CircuitSize s;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const CircuitNode& n = c.node(i);
    ++s.nodes;
    s.edges += n.inputs.size();
    if (n.kind == CircuitNodeKind::Sum) s.params += n.inputs.size() - 1;
    if (n.kind == CircuitNodeKind::Bernoulli) s.params += 1;
    for (std::size_t in : n.inputs) {
      if (!seen[in]) {
        seen[in] = true;
        stack.push_back(in);
      }
    }
  }
  return s;
}

}  // namespace bayespc::testing
