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
#include <span>
#include <vector>

#include "bayespc/cutset.hpp"
#include "bayespc/dataset.hpp"
#include "bayespc/learner.hpp"
#include "bayespc/types.hpp"

namespace bayespc {

/// Weighted mixture of cutset networks over a common scope.
class Mixture {
 public:
  /// Throws std::invalid_argument unless there is at least one component,
  /// the weights are nonnegative, sum to 1 within 1e-12, and all components
  /// share one scope.
  Mixture(std::vector<CutsetNetwork> components, std::vector<double> weights);

  std::size_t size() const { return components_.size(); }
  const CutsetNetwork& component(std::size_t k) const { return components_[k]; }
  std::span<const CutsetNetwork> components() const { return components_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const int> scope() const { return components_.front().scope(); }

 private:
  std::vector<CutsetNetwork> components_;
  std::vector<double> weights_;
};

/// Row-major N x K matrix of component posteriors; each row sums to 1.
struct Responsibilities {
  std::size_t rows = 0;
  std::size_t components = 0;
  std::vector<double> values;

  double at(std::size_t n, std::size_t k) const { return values[n * components + k]; }
  std::span<const double> row(std::size_t n) const {
    return {values.data() + n * components, components};
  }
};

/// ln sum_k a_k p_k(x).
LogScore mixture_log_density(const Mixture& m, std::span<const std::uint8_t> x);

/// sum_rows w * ln p_mix(row).
LogScore mixture_log_likelihood(const Mixture& m, const WeightedDataset& d);

/// Picks a component k with probability a_k and samples from it.
Assignment mixture_sample(const Mixture& m, Rng& rng);

/// Max-product completion: the component maximizing ln a_k + its cnet_mpe
/// value (ties to the lower k) decodes the assignment. The returned score is
/// the mixture log-density of that assignment.
MpeResult mixture_mpe(const Mixture& m, const Evidence& evidence);

/// Partitions the rows with k-means (squared Euclidean distance, weighted
/// centroids, k-means++ seeding, at most 100 Lloyd iterations or until no
/// centroid moves by 1e-6). Returns K disjoint sub-datasets covering d. If K
/// exceeds the number of distinct rows, rows are dealt round-robin instead.
/// Any cluster left empty takes the worst-fitting row of the largest cluster.
/// Throws std::invalid_argument if K < 1 or K > d.rows().
std::vector<WeightedDataset> kmeans_init(const WeightedDataset& d, std::size_t K, Rng& rng);

/// gamma[n][k] proportional to a_k p_k(x_n). Throws std::runtime_error naming
/// the row if every component gives it zero density.
Responsibilities e_step(const Mixture& m, const WeightedDataset& d);

/// a_k = sum_n w_n gamma[n][k] / sum_n w_n; component k is relearned from
/// scratch on d reweighted by w_n gamma[n][k]. A component with no
/// responsibility at all is relearned from the single row whose
/// responsibility vector has the highest entropy.
Mixture m_step(const WeightedDataset& d, const Responsibilities& gamma, const LearnerConfig& cfg);

struct SemOptions {
  std::size_t max_iters = 100;
  /// Stop once the train log-likelihood per unit weight improves by less.
  double tol = 1e-4;
};

struct SemResult {
  Mixture mixture;
  /// Train log-likelihood per unit weight of the k-means initialization.
  double initial_ll = 0.0;
  /// Same quantity for the returned mixture (the best iterate).
  double best_ll = 0.0;
  /// Per-iteration values, starting with the initialization.
  std::vector<double> ll_history;
};

/// Structural EM: k-means initialization with one cutset network per
/// cluster, then alternating e_step / m_step. Returns the best iterate.
SemResult learn_sem(const WeightedDataset& d, std::size_t K, const LearnerConfig& cfg, Rng& rng,
                    const SemOptions& options = {});

}  // namespace bayespc
