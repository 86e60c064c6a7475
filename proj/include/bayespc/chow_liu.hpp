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
#include <utility>
#include <vector>

#include "bayespc/dataset.hpp"
#include "bayespc/numerics.hpp"
#include "bayespc/types.hpp"

namespace bayespc {

/// Directed tree-shaped Bayesian network over binary variables.
///
/// Variables are addressed by local index (position in variable_ids()).
/// Each variable owns one CPT row per parent value; the root owns a single
/// row. A row is {P(x=0 | u), P(x=1 | u)}.
class ChowLiuTree {
 public:
  using Row = std::array<double, 2>;

  /// `parents[v]` is the local index of v's parent, or -1 for the root.
  /// `cpt[v]` holds one row for the root and two rows otherwise.
  /// Throws std::invalid_argument if the result is not a rooted tree with
  /// normalized rows.
  ChowLiuTree(std::vector<int> variable_ids, std::vector<int> parents,
              std::vector<std::vector<Row>> cpt);

  /// A tree with the given shape and uniform (0.5, 0.5) rows. Useful where
  /// only the structure matters, e.g. for scoring.
  static ChowLiuTree with_uniform_rows(std::vector<int> variable_ids, std::vector<int> parents);

  std::size_t size() const { return variable_ids_.size(); }
  std::span<const int> variable_ids() const { return variable_ids_; }
  int variable_id(std::size_t v) const { return variable_ids_[v]; }
  std::size_t root() const { return order_.front(); }
  int parent(std::size_t v) const { return parents_[v]; }
  std::span<const int> parents() const { return parents_; }
  /// Root first, every parent before its children.
  std::span<const std::size_t> topological_order() const { return order_; }
  std::span<const std::size_t> children(std::size_t v) const { return children_[v]; }
  std::span<const Row> rows(std::size_t v) const { return cpt_[v]; }
  const std::vector<std::vector<Row>>& cpt() const { return cpt_; }

  /// ln P(x_v = x | parent = u); u is ignored for the root.
  double log_theta(std::size_t v, int u, int x) const {
    return log_cpt_[v][parents_[v] < 0 ? 0 : u][x];
  }

  /// Edges as (parent id, child id) in global variable ids, sorted.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<int> variable_ids_;
  std::vector<int> parents_;
  std::vector<std::vector<Row>> cpt_;
  std::vector<std::vector<Row>> log_cpt_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> order_;
};

/// Empirical mutual information (nats) of a 2x2 weighted table, 0 log 0 = 0,
/// clamped at 0. Throws std::invalid_argument if the table is empty.
double mutual_information(const PairTable& table);

/// Empirical mutual information of variables i and j (global ids) from raw
/// weighted counts. Throws on i == j or zero total weight.
double mutual_information(const WeightedDataset& d, int i, int j);

/// Chow-Liu tree: maximum spanning tree over pairwise mutual information
/// (ties go to the lexicographically smaller (min, max) pair), rooted at the
/// lowest variable id, with CPTs (n(x,u) + beta) / (n(u) + 2 beta). Rows with
/// no mass and beta = 0 fall back to (0.5, 0.5). A dataset with zero total
/// weight has all mutual informations equal to 0.
ChowLiuTree learn_clt(const WeightedDataset& d, double beta);

/// Re-estimates the CPTs of `structure` from `d` with Laplace factor `beta`.
ChowLiuTree fit_clt_parameters(const ChowLiuTree& structure, const WeightedDataset& d, double beta);

/// Sum of pairwise mutual informations over the tree's edges, using the
/// same estimates as learn_clt.
double clt_tree_weight(const ChowLiuTree& t, const WeightedDataset& d);

/// Weighted counts n[u][x] of each family: counts[v][u][x]; the root only
/// uses u = 0.
std::vector<std::array<std::array<double, 2>, 2>> clt_family_counts(const ChowLiuTree& t,
                                                                    const WeightedDataset& d);

/// ln P(x) for an assignment indexed by global variable id.
LogScore clt_log_density(const ChowLiuTree& t, std::span<const std::uint8_t> x);

/// sum_rows w * ln P(row). `d` must be over exactly the tree's variables.
LogScore clt_log_likelihood(const ChowLiuTree& t, const WeightedDataset& d);

/// Log marginal likelihood of the tree's structure with every CPT row given a
/// Dirichlet(alpha/2, alpha/2) prior. Stored CPT values are not used.
LogScore clt_bd_score(const ChowLiuTree& t, const WeightedDataset& d, double alpha);

/// Ancestral sample written into `x` (indexed by global variable id).
void clt_sample_into(const ChowLiuTree& t, Rng& rng, std::span<std::uint8_t> x);

/// Ancestral sample; the result is indexed by global variable id and has
/// length max id + 1 (entries outside the scope are 0).
Assignment clt_sample(const ChowLiuTree& t, Rng& rng);

struct MpeResult {
  Assignment assignment;
  LogScore log_density = kLogZero;
};

/// Exact most probable completion of `evidence` by max-product on the tree.
/// Ties go to value 0. The returned score is the log-density of the returned
/// assignment. Throws std::invalid_argument if evidence observes a variable
/// outside the tree's scope.
MpeResult clt_mpe(const ChowLiuTree& t, const Evidence& evidence);

/// Max-product decoding of the tree's variables into `x` (global ids).
/// Returns the maximized log-product.
LogScore clt_mpe_into(const ChowLiuTree& t, const Evidence& evidence, std::span<std::uint8_t> x);

/// Free parameters of a binary tree over d variables: 2d - 1.
std::size_t clt_param_count(const ChowLiuTree& t);

}  // namespace bayespc
