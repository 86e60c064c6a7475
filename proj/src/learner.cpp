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

#include "bayespc/learner.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bayespc {

namespace {

// Mean per-variable entropy of d over all of its columns.
double mean_entropy(const WeightedDataset& d) {
  const std::size_t m = d.cols();
  std::vector<double> ones(m, 0.0);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double w = d.weight(r);
    if (w == 0.0) continue;
    auto x = d.row(r);
    for (std::size_t c = 0; c < m; ++c) {
      if (x[c]) ones[c] += w;
    }
  }
  double h = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    const double counts[2] = {std::max(d.total_weight() - ones[c], 0.0), ones[c]};
    h += entropy(counts);
  }
  return h / static_cast<double>(m);
}

// Rows of d with column `col` equal to value; all columns kept.
WeightedDataset rows_with(const WeightedDataset& d, std::size_t col, int value) {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    if (d.at(r, col) == value) idx.push_back(r);
  }
  return d.select_rows(idx);
}

}  // namespace

void LearnerConfig::validate() const {
  score.validate();
  if (lambda < 1) throw std::invalid_argument("LearnerConfig: lambda must be at least 1");
}

double information_gain(const WeightedDataset& d, int var) {
  if (d.cols() < 2) throw std::invalid_argument("information_gain: needs at least 2 variables");
  const std::size_t col = d.column_of(var);
  const double total = d.total_weight();
  if (total == 0.0) return 0.0;
  double gain = mean_entropy(d);
  for (int value = 0; value < 2; ++value) {
    const WeightedDataset branch = rows_with(d, col, value);
    if (branch.total_weight() == 0.0) continue;
    gain -= branch.total_weight() / total * mean_entropy(branch);
  }
  return gain;
}

std::vector<int> select_best_candidates(const WeightedDataset& d, std::size_t lambda) {
  if (d.cols() < 2) throw std::invalid_argument("select_best_candidates: needs at least 2 variables");
  struct Scored {
    double gain;
    int var;
  };
  std::vector<Scored> scored;
  for (int var : d.variable_ids()) scored.push_back({information_gain(d, var), var});
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Scored& a, const Scored& b) { return a.gain > b.gain; });
  std::vector<int> out;
  for (std::size_t k = 0; k < std::min(lambda, scored.size()); ++k) out.push_back(scored[k].var);
  return out;
}

std::optional<CutEvaluation> select_best_cut(const ChowLiuTree& leaf, const WeightedDataset& d_leaf,
                                             std::span<const int> candidates,
                                             const LearnerConfig& cfg) {
  std::vector<int> order(candidates.begin(), candidates.end());
  std::sort(order.begin(), order.end());
  std::optional<CutEvaluation> best;
  for (int var : order) {
    CutEvaluation cut = evaluate_cut(leaf, d_leaf, var, cfg.score);
    if (cut.delta > 0.0 && (!best || cut.delta > best->delta)) best = std::move(cut);
  }
  return best;
}

CutsetNetwork learn_cnet(const WeightedDataset& d, const LearnerConfig& config, LearnTrace* trace) {
  if (d.cols() == 0) throw std::invalid_argument("learn_cnet: dataset has no variables");
  if (!(d.total_weight() > 0.0)) throw std::invalid_argument("learn_cnet: dataset has zero total weight");
  LearnerConfig cfg = config;
  if (cfg.score.kind == ScoreKind::BIC && !cfg.score.root_dataset_size) {
    cfg.score.root_dataset_size = d.total_weight();
  }
  cfg.validate();
  const double smoothing = leaf_smoothing(cfg.score);

  CutsetNetwork net(learn_clt(d, smoothing));
  double current = 0.0;
  if (trace) {
    trace->cuts.clear();
    current = trace->initial_score = structure_score(net, d, cfg.score);
  }

  struct Pending {
    std::size_t node;
    WeightedDataset data;
  };
  std::vector<Pending> stack;
  stack.push_back({net.root(), d});
  while (!stack.empty()) {
    Pending item = std::move(stack.back());
    stack.pop_back();
    const ChowLiuTree& leaf = std::get<LeafNode>(net.node(item.node)).tree;
    // An empty leaf cannot gain: every cut scores 0 (BD) or a penalty (BIC).
    if (leaf.size() < 2 || item.data.total_weight() == 0.0) continue;
    const std::vector<int> candidates = select_best_candidates(item.data, cfg.lambda);
    std::optional<CutEvaluation> cut = select_best_cut(leaf, item.data, candidates, cfg);
    if (!cut) continue;

    AcceptedCut record;
    record.node = item.node;
    record.var = cut->var;
    record.delta = cut->delta;
    record.parent_weight = item.data.total_weight();
    record.child_weights = {cut->counts.n0, cut->counts.n1};

    const auto children = net.split_leaf(item.node, cut->var, decision_weights(cut->counts, cfg.score),
                                         std::move(cut->child0), std::move(cut->child1));
    if (trace) {
      record.score_before = current;
      current = record.score_after = structure_score(net, d, cfg.score);
      trace->cuts.push_back(record);
    }
    stack.push_back({children[1], std::move(cut->data1)});
    stack.push_back({children[0], std::move(cut->data0)});
  }
  return net;
}

}  // namespace bayespc
