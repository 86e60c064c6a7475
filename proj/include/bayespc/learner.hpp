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
#include <optional>
#include <span>
#include <vector>

#include "bayespc/cutset.hpp"
#include "bayespc/dataset.hpp"
#include "bayespc/scores.hpp"

namespace bayespc {

struct LearnerConfig {
  ScoreConfig score;
  /// Number of candidate variables scored per leaf.
  std::size_t lambda = 10;

  void validate() const;
};

/// Expected reduction of the mean per-variable entropy from conditioning on
/// `var`:
///   H(D) - sum_v |D_v| / |D| * H(D_v),  H(D) = mean_X H_D(X)
/// where the branch entropies are averaged over the same variable set as D
/// and an empty branch contributes 0. Throws if d has fewer than 2 variables.
double information_gain(const WeightedDataset& d, int var);

/// The (at most) lambda variables with the largest information gain, sorted
/// by decreasing gain, ties to the lower variable id.
std::vector<int> select_best_candidates(const WeightedDataset& d, std::size_t lambda);

/// Evaluates every candidate (in ascending id order) and returns the best cut
/// if its delta is strictly positive. Ties go to the lower variable id.
std::optional<CutEvaluation> select_best_cut(const ChowLiuTree& leaf, const WeightedDataset& d_leaf,
                                             std::span<const int> candidates,
                                             const LearnerConfig& cfg);

struct AcceptedCut {
  std::size_t node = 0;
  int var = 0;
  double delta = 0.0;
  double parent_weight = 0.0;
  std::array<double, 2> child_weights{0.0, 0.0};
  /// Global score of the whole network before and after the cut, recomputed
  /// from scratch.
  double score_before = 0.0;
  double score_after = 0.0;
};

/// Record of a learner run, in the order cuts were accepted.
struct LearnTrace {
  double initial_score = 0.0;
  std::vector<AcceptedCut> cuts;
};

/// Greedy score-guided cutset learning. Starts from one Chow-Liu leaf and
/// repeatedly splits leaves (depth first, branch 0 before branch 1) on the
/// candidate that increases the configured score most, until no candidate
/// improves it. For BIC, |D| defaults to d.total_weight().
///
/// If `trace` is non-null the global score is recomputed after every cut,
/// which costs a full scoring pass per cut.
/// Throws std::invalid_argument if d has zero total weight or no variables.
CutsetNetwork learn_cnet(const WeightedDataset& d, const LearnerConfig& cfg,
                         LearnTrace* trace = nullptr);

}  // namespace bayespc
