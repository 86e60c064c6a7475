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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayespc/chow_liu.hpp"
#include "bayespc/scores.hpp"
#include "testing.hpp"

using namespace bayespc;

namespace {

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

ScoreConfig bic(double beta, double n) {
  ScoreConfig cfg;
  cfg.kind = ScoreKind::BIC;
  cfg.beta = beta;
  cfg.root_dataset_size = n;
  return cfg;
}

ScoreConfig bd(double alpha) {
  ScoreConfig cfg;
  cfg.alpha = alpha;
  return cfg;
}

// Under x0 = 0 the other columns are copies of one fair bit; under x0 = 1
// they alternate. No single tree over all columns captures both.
WeightedDataset switched_couplings(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<std::vector<std::uint8_t>> data;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::uint8_t> x(cols);
    x[0] = uniform01(rng) < 0.5 ? 1 : 0;
    const std::uint8_t b = uniform01(rng) < 0.5 ? 1 : 0;
    for (std::size_t c = 1; c < cols; ++c) x[c] = x[0] == 0 ? b : static_cast<std::uint8_t>(b ^ (c % 2));
    data.push_back(x);
  }
  return WeightedDataset::from_rows(data);
}

}  // namespace

TEST_CASE("bd_sum_node examples") {
  CHECK(bd_sum_node({0, 0}, 0.1) == 0.0);
  CHECK(bd_sum_node({1, 0}, 0.1) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  // Predictives in order 0,1,1,1: (1/2)(1/2 / 2)(3/2 / 3)(5/2 / 4).
  const double prequential = 0.5 * (0.5 / 2.0) * (1.5 / 3.0) * (2.5 / 4.0);
  CHECK(prequential == 0.0390625);
  CHECK(bd_sum_node({1, 3}, 1.0) == doctest::Approx(std::log(prequential)).epsilon(1e-14));
  CHECK(bd_sum_node({3, 1}, 1.0) == doctest::Approx(std::log(prequential)).epsilon(1e-14));
  CHECK_THROWS_AS(bd_sum_node({1, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("bd_sum_node accepts fractional counts") {
  const double a = bd_sum_node({2.5, 1.25}, 0.1);
  CHECK(std::isfinite(a));
  CHECK(a != bd_sum_node({3, 1}, 0.1));
  CHECK(a != bd_sum_node({2, 1}, 0.1));
}

TEST_CASE("bd_cnet of a single leaf equals clt_bd_score") {
  Rng rng(1);
  const WeightedDataset d = testing::random_dataset(rng, 30, 5);
  const ChowLiuTree t = learn_clt(d, 0.05);
  CHECK(bd_cnet(CutsetNetwork(t), d, 0.1) == clt_bd_score(t, d, 0.1));
  const WeightedDataset empty({}, {0, 1, 2, 3, 4}, {});
  CHECK(bd_cnet(CutsetNetwork(t), empty, 0.1) == 0.0);
}

TEST_CASE("bd_cnet of a depth-1 net equals the prequential product") {
  Rng rng(12);
  const WeightedDataset d = testing::random_dataset(rng, 8, 3);
  CutsetNetwork net(testing::random_tree(rng, {0, 1, 2}));
  net.split_leaf(0, 1, {0.4, 0.6}, testing::random_tree(rng, {0, 2}), testing::random_tree(rng, {0, 2}));
  const auto order = identity_order(8);
  for (double alpha : {0.1, 1.0}) {
    const double oracle = testing::prequential_log_marginal(net, d, alpha, order);
    CHECK(std::fabs(std::expm1(bd_cnet(net, d, alpha) - oracle)) <= 1e-8);
  }
}

TEST_CASE("bd_cnet equals the prequential product on random nets and is order invariant") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 1 + trial % 6;
    const std::size_t n = static_cast<std::size_t>(uniform01(rng) * 65);
    const CutsetNetwork net = testing::random_cnet(rng, d, trial % 4);
    const WeightedDataset data = testing::random_dataset(rng, n, d, 0.2 + 0.6 * uniform01(rng));
    auto order = identity_order(n);
    std::shuffle(order.begin(), order.end(), rng);
    for (double alpha : {0.1, 1.0}) {
      const double score = bd_cnet(net, data, alpha);
      const double oracle = testing::prequential_log_marginal(net, data, alpha, order);
      CHECK(std::fabs(std::expm1(score - oracle)) <= 1e-8);
      CHECK(std::fabs(bd_cnet(net, data.select_rows(order), alpha) - score) <= 1e-10);
    }
  }
}

TEST_CASE("bd_cnet is finite across alpha") {
  Rng rng(5);
  const WeightedDataset d = testing::random_dataset(rng, 40, 4);
  const CutsetNetwork net = testing::random_cnet(rng, 4, 2);
  double previous = 0.0;
  for (double alpha : {0.01, 0.1, 1.0, 10.0}) {
    const double s = bd_cnet(net, d, alpha);
    CHECK(std::isfinite(s));
    CHECK(s != previous);
    previous = s;
  }
}

TEST_CASE("score locality: a cut changes the total by exactly its delta") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const WeightedDataset d = testing::random_dataset(rng, 50, 5, 0.3);
    CutsetNetwork net(learn_clt(d, 0.05));
    const double before = bd_cnet(net, d, 0.1);
    const int var = trial % 5;
    const CutEvaluation cut = evaluate_cut(std::get<LeafNode>(net.node(0)).tree, d, var, bd(0.1));
    net.split_leaf(0, var, decision_weights(cut.counts, bd(0.1)), cut.child0, cut.child1);
    CHECK(bd_cnet(net, d, 0.1) - before == doctest::Approx(cut.delta).epsilon(1e-12).scale(std::fabs(before)));

    const ScoreConfig b = bic(0.01, d.total_weight());
    CutsetNetwork leaf_net(learn_clt(d, 0.01));
    const double bic_before = bic_cnet(leaf_net, d, b);
    const CutEvaluation bcut = evaluate_cut(std::get<LeafNode>(leaf_net.node(0)).tree, d, var, b);
    leaf_net.split_leaf(0, var, decision_weights(bcut.counts, b), bcut.child0, bcut.child1);
    CHECK(bic_cnet(leaf_net, d, b) - bic_before ==
          doctest::Approx(bcut.delta).epsilon(1e-12).scale(std::fabs(bic_before)));
  }
}

TEST_CASE("bic_cnet of a single leaf is LL minus the tree penalty") {
  Rng rng(3);
  const WeightedDataset d = testing::random_dataset(rng, 64, 4);
  const double n = d.total_weight();
  const ChowLiuTree t = learn_clt(d, 0.0);
  const double expected = clt_log_likelihood(t, d) - std::log(n) / 2.0 * 7.0;
  CHECK(bic_cnet(CutsetNetwork(t), d, bic(0.0, n)) == expected);

  const ChowLiuTree s = learn_clt(d, 0.01);
  CHECK(bic_cnet(CutsetNetwork(s), d, bic(0.01, n)) ==
        doctest::Approx(clt_log_likelihood(s, d) - std::log(n) / 2.0 * 7.0).epsilon(1e-14));
}

TEST_CASE("bic penalty uses the configured root size") {
  Rng rng(4);
  const WeightedDataset d = testing::random_dataset(rng, 20, 3);
  const CutsetNetwork net(learn_clt(d, 0.01));
  const double a = bic_cnet(net, d, bic(0.01, 20.0));
  const double b = bic_cnet(net, d, bic(0.01, 2000.0));
  CHECK(a - b == doctest::Approx((std::log(2000.0) - std::log(20.0)) / 2.0 * 5.0));
}

TEST_CASE("corrected parameter count") {
  Rng rng(6);
  for (std::size_t d = 2; d <= 9; ++d) {
    CutsetNetwork net(testing::random_tree(rng, [&] {
      std::vector<int> ids(d);
      std::iota(ids.begin(), ids.end(), 0);
      return ids;
    }()));
    CHECK(cnet_param_count(net) == 2 * d - 1);
    std::vector<int> rest;
    for (std::size_t v = 1; v < d; ++v) rest.push_back(static_cast<int>(v));
    const std::size_t before = cnet_param_count(net);
    net.split_leaf(0, 0, {0.5, 0.5}, testing::random_tree(rng, rest), testing::random_tree(rng, rest));
    CHECK(cnet_param_count(net) - before == 2 * d - 4);
    CHECK(decision_only_param_count(net) == 1);
    CHECK(cnet_param_count(net) > decision_only_param_count(net));
  }
}

TEST_CASE("cut on a two-variable leaf adds no parameters") {
  Rng rng(7);
  const WeightedDataset d = testing::random_dataset(rng, 30, 2);
  const ChowLiuTree leaf = learn_clt(d, 0.01);
  const ScoreConfig cfg = bic(0.01, 1000.0);
  const CutEvaluation cut = evaluate_cut(leaf, d, 0, cfg);
  CutsetNetwork before(leaf);
  CutsetNetwork after = before.with_cut(0, 0, decision_weights(cut.counts, cfg), cut.child0, cut.child1);
  CHECK(cnet_param_count(after) == cnet_param_count(before));
  // With no penalty change the delta is the pure log-likelihood change.
  const double ll_change = bic_cnet(after, d, cfg) - bic_cnet(before, d, cfg);
  CHECK(cut.delta == doctest::Approx(ll_change).epsilon(1e-12));
}

TEST_CASE("cut_score_delta rejects a noise variable under BD") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const WeightedDataset d = testing::independent_dataset(rng, 2000, 4);
    const ChowLiuTree leaf = learn_clt(d, 0.05);
    CAPTURE(seed);
    CHECK(cut_score_delta(leaf, d, 0, bd(0.1)) < 0.0);
  }
}

TEST_CASE("cut_score_delta accepts a variable that switches the couplings") {
  Rng rng(10);
  for (std::size_t n : {16, 64, 512}) {
    const WeightedDataset d = switched_couplings(rng, n, 5);
    CAPTURE(n);
    CHECK(cut_score_delta(learn_clt(d, 0.05), d, 0, bd(0.1)) > 0.0);
    CHECK(cut_score_delta(learn_clt(d, 0.01), d, 0, bic(0.01, static_cast<double>(n))) > 0.0);
  }
}

TEST_CASE("evaluate_cut errors") {
  const WeightedDataset d = WeightedDataset::from_rows({{1}, {0}});
  CHECK_THROWS_AS(evaluate_cut(learn_clt(d, 0.1), d, 0, bd(0.1)), std::invalid_argument);
  const WeightedDataset two = WeightedDataset::from_rows({{1, 0}, {0, 0}});
  ScoreConfig no_root;
  no_root.kind = ScoreKind::BIC;
  CHECK_THROWS_AS(evaluate_cut(learn_clt(two, 0.1), two, 0, no_root), std::invalid_argument);
}

TEST_CASE("empty branch is allowed and scored") {
  const WeightedDataset d = WeightedDataset::from_rows({{0, 1, 1}, {0, 0, 0}, {0, 1, 1}});
  const CutEvaluation cut = evaluate_cut(learn_clt(d, 0.05), d, 0, bd(0.1));
  CHECK(cut.counts.n1 == 0.0);
  CHECK(cut.data1.empty());
  CHECK(std::isfinite(cut.delta));
}

TEST_CASE("routed counts partition the parent weight") {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const CutsetNetwork net = testing::random_cnet(rng, 6, 4);
    WeightedDataset d = testing::random_dataset(rng, 40, 6);
    std::vector<double> w(d.rows());
    for (auto& x : w) x = uniform01(rng);
    d = d.with_weights(w);
    const auto counts = routed_counts(net, d);
    CHECK(counts[net.root()].total() == doctest::Approx(d.total_weight()).epsilon(1e-12));
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      if (net.is_leaf(i)) continue;
      const auto& dec = std::get<DecisionNode>(net.node(i));
      for (int k = 0; k < 2; ++k) {
        const std::size_t c = dec.children[k];
        if (net.is_leaf(c)) continue;
        CHECK(counts[c].total() == doctest::Approx(k == 0 ? counts[i].n0 : counts[i].n1).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("fractional weights are not rounded") {
  Rng rng(2);
  const WeightedDataset d = testing::random_dataset(rng, 16, 3);
  const WeightedDataset half = d.with_weights(std::vector<double>(d.rows(), 0.5));
  const WeightedDataset rounded = d.with_weights(std::vector<double>(d.rows(), 1.0));
  const CutsetNetwork net(learn_clt(d, 0.05));
  CHECK(bd_cnet(net, half, 0.1) != bd_cnet(net, rounded, 0.1));
  CHECK(std::isfinite(bd_cnet(net, half, 0.1)));
}

TEST_CASE("ScoreConfig validation") {
  ScoreConfig cfg;
  cfg.alpha = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  ScoreConfig b = bic(-0.1, 10);
  CHECK_THROWS_AS(b.validate(), std::invalid_argument);
  ScoreConfig c = bic(0.1, 0.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
