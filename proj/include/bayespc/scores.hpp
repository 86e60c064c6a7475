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
#include <optional>
#include <vector>

#include "bayespc/chow_liu.hpp"
#include "bayespc/cutset.hpp"
#include "bayespc/dataset.hpp"
#include "bayespc/numerics.hpp"

namespace bayespc {

enum class ScoreKind { BD, BIC };

struct ScoreConfig {
  ScoreKind kind = ScoreKind::BD;
  /// Equivalent sample size of every Dirichlet prior (BD).
  double alpha = 0.1;
  /// Laplace smoothing factor (BIC).
  double beta = 0.01;
  /// |D| in the BIC penalty: the weight of the full training set. When empty
  /// the total weight of the dataset being scored is used.
  std::optional<double> root_dataset_size;

  /// Throws std::invalid_argument if alpha <= 0 (BD) or beta < 0 or a set
  /// root_dataset_size <= 0 (BIC).
  void validate() const;
};

/// Weighted counts routed into the two branches of a decision (sum) node.
struct SumNodeCounts {
  double n0 = 0.0;
  double n1 = 0.0;
  double total() const { return n0 + n1; }
};

/// Bayes-Dirichlet marginal likelihood of one binary sum node whose weights
/// have a Dirichlet(alpha/2, alpha/2) prior:
///   lnG(a) - lnG(a + n0 + n1) + sum_k [lnG(a/2 + n_k) - lnG(a/2)].
/// Counts may be fractional.
LogScore bd_sum_node(SumNodeCounts counts, double alpha);

/// Exact log marginal likelihood of the network's structure: bd_sum_node for
/// each decision on its routed counts plus clt_bd_score for each leaf on its
/// routed sub-dataset.
LogScore bd_cnet(const CutsetNetwork& net, const WeightedDataset& d, double alpha);

/// LL(G; D) - ln|D| / 2 * ||G||, where LL uses beta-smoothed maximum
/// likelihood parameters re-estimated from `d` on the network's structure,
/// and ||G|| is cnet_param_count.
LogScore bic_cnet(const CutsetNetwork& net, const WeightedDataset& d, const ScoreConfig& cfg);

/// bd_cnet or bic_cnet according to cfg.kind.
LogScore structure_score(const CutsetNetwork& net, const WeightedDataset& d, const ScoreConfig& cfg);

/// Independent parameters of the compiled circuit: one per decision plus
/// 2 d_leaf - 1 per leaf.
std::size_t cnet_param_count(const CutsetNetwork& net);

/// Parameter count that only counts decision nodes and ignores the leaves'
/// Chow-Liu trees. Kept for comparison with the corrected count above.
std::size_t decision_only_param_count(const CutsetNetwork& net);

/// Counts routed through each decision node (indexed like net.nodes(); zero
/// for leaves).
std::vector<SumNodeCounts> routed_counts(const CutsetNetwork& net, const WeightedDataset& d);

/// Laplace factor for leaf CPTs: alpha/2 (posterior mean) for BD, beta for BIC.
double leaf_smoothing(const ScoreConfig& cfg);

/// Decision weights after accepting a cut: (n_k + alpha/2) / (n + alpha) for
/// BD, (n_k + beta) / (n + 2 beta) for BIC; (0.5, 0.5) if both are undefined.
std::array<double, 2> decision_weights(SumNodeCounts counts, const ScoreConfig& cfg);

/// One candidate cut of a leaf, with the artifacts needed to apply it.
struct CutEvaluation {
  int var = 0;
  double delta = 0.0;
  SumNodeCounts counts;
  ChowLiuTree child0;
  ChowLiuTree child1;
  WeightedDataset data0;
  WeightedDataset data1;
};

/// Scores replacing `leaf` (learned on `d_leaf`) by a decision on `var` with
/// two Chow-Liu children learned on the restricted data.
///   BD:  bd_sum_node + bd(child0) + bd(child1) - bd(leaf)
///   BIC: delta LL - ln|D| / 2 * (2 d - 4)
/// Throws std::invalid_argument if the leaf scope has fewer than 2 variables,
/// or for BIC if cfg.root_dataset_size is unset.
CutEvaluation evaluate_cut(const ChowLiuTree& leaf, const WeightedDataset& d_leaf, int var,
                           const ScoreConfig& cfg);

/// evaluate_cut(...).delta
double cut_score_delta(const ChowLiuTree& leaf, const WeightedDataset& d_leaf, int var,
                       const ScoreConfig& cfg);

}  // namespace bayespc
