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

#include "bayespc/scores.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace bayespc {

namespace {

// Calls visit_leaf(tree, data) for every leaf and visit_decision(index, counts)
// for every decision, with the dataset routed down the network.
void route(const CutsetNetwork& net, std::size_t index, const WeightedDataset& d,
           const std::function<void(std::size_t, SumNodeCounts)>& visit_decision,
           const std::function<void(const ChowLiuTree&, const WeightedDataset&)>& visit_leaf) {
  if (const auto* leaf = std::get_if<LeafNode>(&net.node(index))) {
    visit_leaf(leaf->tree, d);
    return;
  }
  const auto& dec = std::get<DecisionNode>(net.node(index));
  WeightedDataset d0 = d.restrict(dec.var, 0);
  WeightedDataset d1 = d.restrict(dec.var, 1);
  visit_decision(index, {d0.total_weight(), d1.total_weight()});
  route(net, dec.children[0], d0, visit_decision, visit_leaf);
  route(net, dec.children[1], d1, visit_decision, visit_leaf);
}

void require_scope(const CutsetNetwork& net, const WeightedDataset& d, const char* who) {
  if (!std::equal(net.scope().begin(), net.scope().end(), d.variable_ids().begin(),
                  d.variable_ids().end())) {
    throw std::invalid_argument(std::string(who) + ": dataset variables differ from the network scope");
  }
}

double bic_penalty(const ScoreConfig& cfg, const WeightedDataset& d, double params) {
  const double n = cfg.root_dataset_size.value_or(d.total_weight());
  if (!(n > 0.0)) throw std::invalid_argument("BIC: dataset size must be positive");
  return std::log(n) / 2.0 * params;
}

double decision_log_likelihood(SumNodeCounts c, const ScoreConfig& cfg) {
  const auto w = decision_weights(c, cfg);
  return xlogy(c.n0, w[0]) + xlogy(c.n1, w[1]);
}

// Log-likelihood of the data under the tree's structure with beta-smoothed
// maximum likelihood parameters.
double refit_log_likelihood(const ChowLiuTree& tree, const WeightedDataset& d, double beta) {
  return clt_log_likelihood(fit_clt_parameters(tree, d, beta), d);
}

}  // namespace

void ScoreConfig::validate() const {
  if (kind == ScoreKind::BD && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw std::invalid_argument("ScoreConfig: alpha must be positive");
  }
  if (kind == ScoreKind::BIC) {
    if (!(beta >= 0.0 && std::isfinite(beta))) {
      throw std::invalid_argument("ScoreConfig: beta must be nonnegative");
    }
    if (root_dataset_size && !(*root_dataset_size > 0.0)) {
      throw std::invalid_argument("ScoreConfig: root_dataset_size must be positive");
    }
  }
}

LogScore bd_sum_node(SumNodeCounts counts, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("bd_sum_node: alpha must be positive");
  if (!(counts.n0 >= 0.0 && counts.n1 >= 0.0)) {
    throw std::invalid_argument("bd_sum_node: counts must be nonnegative");
  }
  const double half = alpha / 2.0;
  return log_gamma(alpha) - log_gamma(alpha + counts.n0 + counts.n1) +
         (log_gamma(half + counts.n0) - log_gamma(half)) +
         (log_gamma(half + counts.n1) - log_gamma(half));
}

LogScore bd_cnet(const CutsetNetwork& net, const WeightedDataset& d, double alpha) {
  require_scope(net, d, "bd_cnet");
  double score = 0.0;
  route(
      net, net.root(), d, [&](std::size_t, SumNodeCounts c) { score += bd_sum_node(c, alpha); },
      [&](const ChowLiuTree& tree, const WeightedDataset& dl) { score += clt_bd_score(tree, dl, alpha); });
  return score;
}

LogScore bic_cnet(const CutsetNetwork& net, const WeightedDataset& d, const ScoreConfig& cfg) {
  require_scope(net, d, "bic_cnet");
  cfg.validate();
  double ll = 0.0;
  route(
      net, net.root(), d,
      [&](std::size_t, SumNodeCounts c) { ll += decision_log_likelihood(c, cfg); },
      [&](const ChowLiuTree& tree, const WeightedDataset& dl) {
        ll += refit_log_likelihood(tree, dl, cfg.beta);
      });
  return ll - bic_penalty(cfg, d, static_cast<double>(cnet_param_count(net)));
}

LogScore structure_score(const CutsetNetwork& net, const WeightedDataset& d, const ScoreConfig& cfg) {
  cfg.validate();
  return cfg.kind == ScoreKind::BD ? bd_cnet(net, d, cfg.alpha) : bic_cnet(net, d, cfg);
}

std::size_t cnet_param_count(const CutsetNetwork& net) {
  std::size_t params = 0;
  for (const CnetNode& node : net.nodes()) {
    if (const auto* leaf = std::get_if<LeafNode>(&node)) {
      params += clt_param_count(leaf->tree);
    } else {
      params += 1;
    }
  }
  return params;
}

std::size_t decision_only_param_count(const CutsetNetwork& net) { return net.decision_count(); }

std::vector<SumNodeCounts> routed_counts(const CutsetNetwork& net, const WeightedDataset& d) {
  require_scope(net, d, "routed_counts");
  std::vector<SumNodeCounts> out(net.node_count());
  route(
      net, net.root(), d, [&](std::size_t index, SumNodeCounts c) { out[index] = c; },
      [](const ChowLiuTree&, const WeightedDataset&) {});
  return out;
}

double leaf_smoothing(const ScoreConfig& cfg) {
  return cfg.kind == ScoreKind::BD ? cfg.alpha / 2.0 : cfg.beta;
}

std::array<double, 2> decision_weights(SumNodeCounts c, const ScoreConfig& cfg) {
  const double pseudo = leaf_smoothing(cfg);
  const double denom = c.total() + 2.0 * pseudo;
  if (denom == 0.0) return {0.5, 0.5};
  return {(c.n0 + pseudo) / denom, (c.n1 + pseudo) / denom};
}

CutEvaluation evaluate_cut(const ChowLiuTree& leaf, const WeightedDataset& d_leaf, int var,
                           const ScoreConfig& cfg) {
  cfg.validate();
  const std::size_t d = leaf.size();
  if (d < 2) throw std::invalid_argument("evaluate_cut: leaf scope needs at least 2 variables");
  if (!d_leaf.find_column(var)) throw std::invalid_argument("evaluate_cut: variable not in the leaf");

  CutEvaluation cut{var,
                    0.0,
                    {},
                    leaf,
                    leaf,
                    d_leaf.restrict(var, 0),
                    d_leaf.restrict(var, 1)};
  cut.counts = {cut.data0.total_weight(), cut.data1.total_weight()};
  const double smoothing = leaf_smoothing(cfg);
  cut.child0 = learn_clt(cut.data0, smoothing);
  cut.child1 = learn_clt(cut.data1, smoothing);

  if (cfg.kind == ScoreKind::BD) {
    cut.delta = bd_sum_node(cut.counts, cfg.alpha) + clt_bd_score(cut.child0, cut.data0, cfg.alpha) +
                clt_bd_score(cut.child1, cut.data1, cfg.alpha) - clt_bd_score(leaf, d_leaf, cfg.alpha);
  } else {
    const double ll_after = decision_log_likelihood(cut.counts, cfg) +
                            refit_log_likelihood(cut.child0, cut.data0, cfg.beta) +
                            refit_log_likelihood(cut.child1, cut.data1, cfg.beta);
    const double ll_before = refit_log_likelihood(leaf, d_leaf, cfg.beta);
    if (!cfg.root_dataset_size) {
      throw std::invalid_argument("evaluate_cut: BIC needs root_dataset_size (the full training weight)");
    }
    const double extra_params = 2.0 * static_cast<double>(d) - 4.0;
    cut.delta = (ll_after - ll_before) - bic_penalty(cfg, d_leaf, extra_params);
  }
  return cut;
}

double cut_score_delta(const ChowLiuTree& leaf, const WeightedDataset& d_leaf, int var,
                       const ScoreConfig& cfg) {
  return evaluate_cut(leaf, d_leaf, var, cfg).delta;
}

}  // namespace bayespc
