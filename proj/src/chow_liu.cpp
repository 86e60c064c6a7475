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

#include "bayespc/chow_liu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>

#include "bayespc/scores.hpp"

namespace bayespc {

namespace {

constexpr double kRowTolerance = 1e-12;

ChowLiuTree::Row smoothed_row(double n0, double n1, double beta) {
  const double denom = n0 + n1 + 2.0 * beta;
  if (denom == 0.0) return {0.5, 0.5};
  return {(n0 + beta) / denom, (n1 + beta) / denom};
}

// Weighted 2x2 tables for every pair i < j of columns, upper-triangular,
// accumulated row by row in the same order as pair_counts.
class PairwiseCounts {
 public:
  explicit PairwiseCounts(const WeightedDataset& d) : m_(d.cols()), cells_(m_ * m_ * 4, 0.0) {
    for (std::size_t r = 0; r < d.rows(); ++r) {
      const double w = d.weight(r);
      if (w == 0.0) continue;
      const std::uint8_t* x = d.row(r).data();
      for (std::size_t i = 0; i < m_; ++i) {
        double* base = cells_.data() + (i * m_) * 4 + x[i] * 2;
        for (std::size_t j = i + 1; j < m_; ++j) base[j * 4 + x[j]] += w;
      }
    }
  }

  PairTable table(std::size_t i, std::size_t j) const {
    const double* c = cells_.data() + (i * m_ + j) * 4;
    return {{{c[0], c[1]}, {c[2], c[3]}}};
  }

 private:
  std::size_t m_;
  std::vector<double> cells_;
};

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> parent;
};

// Orients an undirected spanning tree away from local index 0, visiting
// neighbours in ascending order.
std::vector<int> orient(std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(m);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  std::vector<int> parents(m, -2);
  parents[0] = -1;
  std::queue<std::size_t> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t u : adj[v]) {
      if (parents[u] == -2) {
        parents[u] = static_cast<int>(v);
        frontier.push(u);
      }
    }
  }
  return parents;
}

std::vector<int> scope_of(const WeightedDataset& d) {
  return {d.variable_ids().begin(), d.variable_ids().end()};
}

void require_same_scope(const ChowLiuTree& t, const WeightedDataset& d, const char* who) {
  if (!std::equal(t.variable_ids().begin(), t.variable_ids().end(), d.variable_ids().begin(),
                  d.variable_ids().end())) {
    throw std::invalid_argument(std::string(who) + ": dataset variables differ from the tree scope");
  }
}

}  // namespace

ChowLiuTree::ChowLiuTree(std::vector<int> variable_ids, std::vector<int> parents,
                         std::vector<std::vector<Row>> cpt)
    : variable_ids_(std::move(variable_ids)), parents_(std::move(parents)), cpt_(std::move(cpt)) {
  const std::size_t m = variable_ids_.size();
  if (m == 0) throw std::invalid_argument("ChowLiuTree: empty scope");
  if (parents_.size() != m || cpt_.size() != m) {
    throw std::invalid_argument("ChowLiuTree: parents/cpt length differs from scope");
  }
  for (std::size_t v = 1; v < m; ++v) {
    if (variable_ids_[v - 1] >= variable_ids_[v]) {
      throw std::invalid_argument("ChowLiuTree: variable ids must be distinct and ascending");
    }
  }
  children_.assign(m, {});
  std::size_t roots = 0;
  std::size_t root = 0;
  for (std::size_t v = 0; v < m; ++v) {
    const int p = parents_[v];
    if (p == -1) {
      ++roots;
      root = v;
    } else if (p < 0 || static_cast<std::size_t>(p) >= m || static_cast<std::size_t>(p) == v) {
      throw std::invalid_argument("ChowLiuTree: bad parent index");
    } else {
      children_[p].push_back(v);
    }
  }
  if (roots != 1) throw std::invalid_argument("ChowLiuTree: need exactly one root");
  order_.reserve(m);
  order_.push_back(root);
  for (std::size_t k = 0; k < order_.size(); ++k) {
    for (std::size_t c : children_[order_[k]]) order_.push_back(c);
  }
  if (order_.size() != m) throw std::invalid_argument("ChowLiuTree: parent links contain a cycle");

  log_cpt_.resize(m);
  for (std::size_t v = 0; v < m; ++v) {
    const std::size_t expected = parents_[v] < 0 ? 1 : 2;
    if (cpt_[v].size() != expected) {
      throw std::invalid_argument("ChowLiuTree: variable " + std::to_string(variable_ids_[v]) +
                                  " needs " + std::to_string(expected) + " CPT rows");
    }
    for (const Row& row : cpt_[v]) {
      if (!(row[0] >= 0.0 && row[0] <= 1.0 && row[1] >= 0.0 && row[1] <= 1.0) ||
          std::abs(row[0] + row[1] - 1.0) > kRowTolerance) {
        throw std::invalid_argument("ChowLiuTree: CPT row of variable " +
                                    std::to_string(variable_ids_[v]) + " is not normalized");
      }
      log_cpt_[v].push_back({std::log(row[0]), std::log(row[1])});
    }
  }
}

ChowLiuTree ChowLiuTree::with_uniform_rows(std::vector<int> variable_ids, std::vector<int> parents) {
  std::vector<std::vector<Row>> cpt(parents.size());
  for (std::size_t v = 0; v < parents.size(); ++v) {
    cpt[v].assign(parents[v] < 0 ? 1 : 2, Row{0.5, 0.5});
  }
  return ChowLiuTree(std::move(variable_ids), std::move(parents), std::move(cpt));
}

std::vector<std::pair<int, int>> ChowLiuTree::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (parents_[v] >= 0) out.emplace_back(variable_ids_[parents_[v]], variable_ids_[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double mutual_information(const PairTable& t) {
  const double total = t[0][0] + t[0][1] + t[1][0] + t[1][1];
  if (!(total > 0.0)) throw std::invalid_argument("mutual_information: zero total weight");
  const double row[2] = {t[0][0] + t[0][1], t[1][0] + t[1][1]};
  const double col[2] = {t[0][0] + t[1][0], t[0][1] + t[1][1]};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double n = t[a][b];
      if (n > 0.0) mi += (n / total) * std::log((n * total) / (row[a] * col[b]));
    }
  }
  return std::max(mi, 0.0);
}

double mutual_information(const WeightedDataset& d, int i, int j) {
  return mutual_information(pair_counts(d, i, j));
}

std::vector<std::array<std::array<double, 2>, 2>> clt_family_counts(const ChowLiuTree& t,
                                                                    const WeightedDataset& d) {
  require_same_scope(t, d, "clt_family_counts");
  const std::size_t m = t.size();
  std::vector<std::array<std::array<double, 2>, 2>> n(m, {{{0.0, 0.0}, {0.0, 0.0}}});
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double w = d.weight(r);
    if (w == 0.0) continue;
    const std::uint8_t* x = d.row(r).data();
    for (std::size_t v = 0; v < m; ++v) {
      const int p = t.parent(v);
      n[v][p < 0 ? 0 : x[p]][x[v]] += w;
    }
  }
  return n;
}

ChowLiuTree fit_clt_parameters(const ChowLiuTree& structure, const WeightedDataset& d, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("fit_clt_parameters: beta must be >= 0");
  const auto n = clt_family_counts(structure, d);
  std::vector<std::vector<ChowLiuTree::Row>> cpt(structure.size());
  for (std::size_t v = 0; v < structure.size(); ++v) {
    const std::size_t rows = structure.parent(v) < 0 ? 1 : 2;
    for (std::size_t u = 0; u < rows; ++u) cpt[v].push_back(smoothed_row(n[v][u][0], n[v][u][1], beta));
  }
  return ChowLiuTree(scope_of(d), {structure.parents().begin(), structure.parents().end()},
                     std::move(cpt));
}

ChowLiuTree learn_clt(const WeightedDataset& d, double beta) {
  const std::size_t m = d.cols();
  if (m == 0) throw std::invalid_argument("learn_clt: dataset has no variables");
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges;
  if (m > 1) {
    struct Candidate {
      double mi;
      std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(m * (m - 1) / 2);
    const bool has_mass = d.total_weight() > 0.0;
    const PairwiseCounts counts = has_mass ? PairwiseCounts(d) : PairwiseCounts(WeightedDataset());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        candidates.push_back({has_mass ? mutual_information(counts.table(i, j)) : 0.0, i, j});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.mi > b.mi; });
    DisjointSets sets(m);
    for (const Candidate& c : candidates) {
      if (sets.unite(c.i, c.j)) {
        tree_edges.emplace_back(c.i, c.j);
        if (tree_edges.size() == m - 1) break;
      }
    }
  }
  return fit_clt_parameters(ChowLiuTree::with_uniform_rows(scope_of(d), orient(m, tree_edges)), d, beta);
}

double clt_tree_weight(const ChowLiuTree& t, const WeightedDataset& d) {
  require_same_scope(t, d, "clt_tree_weight");
  if (d.total_weight() == 0.0) return 0.0;
  std::vector<double> mis;
  for (auto [p, c] : t.edges()) mis.push_back(mutual_information(d, std::min(p, c), std::max(p, c)));
  std::sort(mis.begin(), mis.end());
  return std::accumulate(mis.begin(), mis.end(), 0.0);
}

LogScore clt_log_density(const ChowLiuTree& t, std::span<const std::uint8_t> x) {
  const std::size_t bound = static_cast<std::size_t>(t.variable_ids().back()) + 1;
  if (x.size() < bound) throw std::invalid_argument("clt_log_density: assignment too short");
  double lp = 0.0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const int p = t.parent(v);
    lp += t.log_theta(v, p < 0 ? 0 : x[t.variable_id(p)], x[t.variable_id(v)]);
  }
  return lp;
}

LogScore clt_log_likelihood(const ChowLiuTree& t, const WeightedDataset& d) {
  require_same_scope(t, d, "clt_log_likelihood");
  double ll = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double w = d.weight(r);
    if (w == 0.0) continue;
    const std::uint8_t* x = d.row(r).data();
    double lp = 0.0;
    for (std::size_t v = 0; v < t.size(); ++v) {
      const int p = t.parent(v);
      lp += t.log_theta(v, p < 0 ? 0 : x[p], x[v]);
    }
    ll += w * lp;
  }
  return ll;
}

LogScore clt_bd_score(const ChowLiuTree& t, const WeightedDataset& d, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("clt_bd_score: alpha must be > 0");
  const auto n = clt_family_counts(t, d);
  double score = 0.0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    const std::size_t rows = t.parent(v) < 0 ? 1 : 2;
    for (std::size_t u = 0; u < rows; ++u) score += bd_sum_node({n[v][u][0], n[v][u][1]}, alpha);
  }
  return score;
}

void clt_sample_into(const ChowLiuTree& t, Rng& rng, std::span<std::uint8_t> x) {
  for (std::size_t v : t.topological_order()) {
    const int p = t.parent(v);
    const auto& row = t.rows(v)[p < 0 ? 0 : x[t.variable_id(p)]];
    x[t.variable_id(v)] = uniform01(rng) < row[0] ? 0 : 1;
  }
}

Assignment clt_sample(const ChowLiuTree& t, Rng& rng) {
  Assignment x(static_cast<std::size_t>(t.variable_ids().back()) + 1, 0);
  clt_sample_into(t, rng, x);
  return x;
}

LogScore clt_mpe_into(const ChowLiuTree& t, const Evidence& evidence, std::span<std::uint8_t> x) {
  const std::size_t m = t.size();
  // best[v][u]: value of v maximizing its subtree given parent value u.
  std::vector<std::array<double, 2>> message(m, {0.0, 0.0});
  std::vector<std::array<std::uint8_t, 2>> best(m, {0, 0});
  const auto order = t.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t v = *it;
    const int var = t.variable_id(v);
    std::array<double, 2> below{0.0, 0.0};
    for (std::size_t c : t.children(v)) {
      below[0] += message[c][0];
      below[1] += message[c][1];
    }
    const int parent_values = t.parent(v) < 0 ? 1 : 2;
    for (int u = 0; u < parent_values; ++u) {
      double top = kLogZero;
      std::uint8_t arg = 0;
      bool any = false;
      for (int value = 0; value < 2; ++value) {
        if (observed(evidence, var) && evidence[var] != value) continue;
        const double s = t.log_theta(v, u, value) + below[value];
        if (!any || s > top) {
          top = s;
          arg = static_cast<std::uint8_t>(value);
          any = true;
        }
      }
      message[v][u] = top;
      best[v][u] = arg;
    }
  }
  for (std::size_t v : order) {
    const int p = t.parent(v);
    x[t.variable_id(v)] = best[v][p < 0 ? 0 : x[t.variable_id(p)]];
  }
  return message[t.root()][0];
}

MpeResult clt_mpe(const ChowLiuTree& t, const Evidence& evidence) {
  for (std::size_t var = 0; var < evidence.size(); ++var) {
    if (evidence[var] == kUnobserved) continue;
    if (evidence[var] != 0 && evidence[var] != 1) {
      throw std::invalid_argument("clt_mpe: evidence values must be 0, 1 or unobserved");
    }
    if (!std::binary_search(t.variable_ids().begin(), t.variable_ids().end(), static_cast<int>(var))) {
      throw std::invalid_argument("clt_mpe: evidence on variable " + std::to_string(var) +
                                  " outside the tree scope");
    }
  }
  MpeResult result;
  result.assignment.assign(static_cast<std::size_t>(t.variable_ids().back()) + 1, 0);
  clt_mpe_into(t, evidence, result.assignment);
  result.log_density = clt_log_density(t, result.assignment);
  return result;
}

std::size_t clt_param_count(const ChowLiuTree& t) { return 2 * t.size() - 1; }

}  // namespace bayespc
