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

#include <cmath>

#include "bayespc/circuit.hpp"
#include "bayespc/learner.hpp"
#include "testing.hpp"

using namespace bayespc;

namespace {

LearnerConfig config(ScoreKind kind) {
  LearnerConfig cfg;
  cfg.score.kind = kind;
  return cfg;
}

bool same_structure(const CutsetNetwork& a, const CutsetNetwork& b) {
  if (a.node_count() != b.node_count() || a.root() != b.root()) return false;
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    if (a.is_leaf(i) != b.is_leaf(i)) return false;
    if (a.is_leaf(i)) {
      const auto& ta = std::get<LeafNode>(a.node(i)).tree;
      const auto& tb = std::get<LeafNode>(b.node(i)).tree;
      if (ta.edges() != tb.edges() || ta.cpt() != tb.cpt()) return false;
    } else {
      const auto& da = std::get<DecisionNode>(a.node(i));
      const auto& db = std::get<DecisionNode>(b.node(i));
      if (da.var != db.var || da.weights != db.weights || da.children != db.children) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("information_gain examples") {
  const WeightedDataset pure = WeightedDataset::from_rows({{0, 0}, {1, 1}});
  CHECK(information_gain(pure, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const WeightedDataset constant = WeightedDataset::from_rows({{0, 1}, {0, 0}, {0, 1}});
  CHECK(information_gain(constant, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(information_gain(WeightedDataset::from_rows({{0}}), 0), std::invalid_argument);
}

TEST_CASE("information_gain on independent columns is only the variable's own entropy share") {
  // The branches keep every column, so conditioning removes the entropy of the
  // conditioned variable itself; nothing else is gained on independent data.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const WeightedDataset d = testing::random_dataset(rng, 4096, 6);
    for (int v = 0; v < 6; ++v) {
      const auto counts = value_counts(d, v);
      const double own = entropy(counts) / 6.0;
      CHECK(std::fabs(information_gain(d, v) - own) < 0.02);
    }
  }
}

TEST_CASE("select_best_candidates ordering and ties") {
  const WeightedDataset pure = WeightedDataset::from_rows({{0, 0}, {1, 1}});
  CHECK(select_best_candidates(pure, 1) == std::vector<int>{0});
  const WeightedDataset indep = WeightedDataset::from_rows({{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  // Every variable has the same gain here, so the lowest ids win.
  CHECK(select_best_candidates(indep, 2) == std::vector<int>{0, 1});
  Rng rng(1);
  const WeightedDataset d = testing::random_dataset(rng, 50, 5);
  const auto all = select_best_candidates(d, 10);
  REQUIRE(all.size() == 5);
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double a = information_gain(d, all[i - 1]);
    const double b = information_gain(d, all[i]);
    CHECK((a > b || (a == b && all[i - 1] < all[i])));
  }
}

TEST_CASE("select_best_cut stops when nothing improves") {
  Rng rng(9);
  const WeightedDataset d = testing::independent_dataset(rng, 3000, 4);
  LearnerConfig cfg = config(ScoreKind::BD);
  const ChowLiuTree leaf = learn_clt(d, 0.05);
  const std::vector<int> candidates{0, 1, 2, 3};
  CHECK_FALSE(select_best_cut(leaf, d, candidates, cfg).has_value());
}

TEST_CASE("select_best_cut picks the regime variable on two-regime data") {
  const CutsetNetwork gen = testing::two_regime_generator(8);
  Rng rng(512);
  const WeightedDataset d = testing::sample_dataset(gen, rng, 512);
  const LearnerConfig cfg = config(ScoreKind::BD);
  const ChowLiuTree leaf = learn_clt(d, cfg.score.alpha / 2);
  std::vector<int> all{0, 1, 2, 3, 4, 5, 6, 7};
  const auto cut = select_best_cut(leaf, d, all, cfg);
  REQUIRE(cut.has_value());
  CHECK(cut->var == 0);
  for (int v : all) CHECK(cut_score_delta(leaf, d, v, cfg.score) <= cut->delta);
}

TEST_CASE("learn_cnet basic cases") {
  const WeightedDataset one = WeightedDataset::from_rows({{0}, {1}, {1}});
  const CutsetNetwork net = learn_cnet(one, config(ScoreKind::BD));
  CHECK(net.node_count() == 1);
  CHECK(net.is_leaf(0));
  const WeightedDataset zero({0, 1}, {0, 1}, {0.0});
  CHECK_THROWS_AS(learn_cnet(zero, config(ScoreKind::BD)), std::invalid_argument);
  LearnerConfig bad = config(ScoreKind::BD);
  bad.lambda = 0;
  CHECK_THROWS_AS(learn_cnet(one, bad), std::invalid_argument);
}

TEST_CASE("learn_cnet stays a single leaf on independent data") {
  int with_cuts = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const WeightedDataset d = testing::independent_dataset(rng, 4096, 8);
    if (learn_cnet(d, config(ScoreKind::BD)).decision_count() > 0) ++with_cuts;
  }
  CHECK(with_cuts == 0);
}

TEST_CASE("learn_cnet trace is strictly increasing and ends above the single leaf") {
  for (ScoreKind kind : {ScoreKind::BD, ScoreKind::BIC}) {
    Rng rng(77);
    const CutsetNetwork gen = testing::two_regime_generator(10);
    const WeightedDataset d = testing::sample_dataset(gen, rng, 1000);
    LearnTrace trace;
    const CutsetNetwork net = learn_cnet(d, config(kind), &trace);
    CHECK(net.decision_count() == trace.cuts.size());
    CHECK_FALSE(trace.cuts.empty());
    double previous = trace.initial_score;
    for (const AcceptedCut& cut : trace.cuts) {
      CHECK(cut.delta > 0.0);
      CHECK(cut.score_before == previous);
      CHECK(cut.score_after > cut.score_before);
      CHECK(cut.score_after - cut.score_before == doctest::Approx(cut.delta).epsilon(1e-9).scale(1e3));
      CHECK(cut.child_weights[0] + cut.child_weights[1] == doctest::Approx(cut.parent_weight).epsilon(1e-12));
      previous = cut.score_after;
    }
    LearnerConfig cfg = config(kind);
    cfg.score.root_dataset_size = d.total_weight();
    CHECK(structure_score(net, d, cfg.score) >= trace.initial_score);
    CHECK(trace.cuts.front().var == 0);
  }
}

TEST_CASE("learn_cnet is deterministic") {
  Rng rng(3);
  const WeightedDataset d = testing::sample_dataset(testing::random_cnet(rng, 8, 3), rng, 600);
  for (ScoreKind kind : {ScoreKind::BD, ScoreKind::BIC}) {
    CHECK(same_structure(learn_cnet(d, config(kind)), learn_cnet(d, config(kind))));
  }
}

TEST_CASE("decision weights follow the configured estimator") {
  const CutsetNetwork gen = testing::two_regime_generator(6);
  Rng rng(4);
  const WeightedDataset d = testing::sample_dataset(gen, rng, 400);
  for (ScoreKind kind : {ScoreKind::BD, ScoreKind::BIC}) {
    LearnerConfig cfg = config(kind);
    const CutsetNetwork net = learn_cnet(d, cfg);
    REQUIRE(!net.is_leaf(net.root()));
    const auto& dec = std::get<DecisionNode>(net.node(net.root()));
    const auto counts = routed_counts(net, d)[net.root()];
    const double pseudo = kind == ScoreKind::BD ? cfg.score.alpha / 2 : cfg.score.beta;
    CHECK(dec.weights[0] == doctest::Approx((counts.n0 + pseudo) / (counts.total() + 2 * pseudo)));
  }
}

TEST_CASE("cnet_log_density examples") {
  Rng rng(2);
  const ChowLiuTree t = testing::random_tree(rng, {0, 1, 2});
  const CutsetNetwork single(t);
  const ChowLiuTree a = testing::random_tree(rng, {1, 2});
  const ChowLiuTree b = testing::random_tree(rng, {1, 2});
  CutsetNetwork split(t);
  split.split_leaf(0, 0, {0.3, 0.7}, a, b);
  for (const Assignment& x : testing::all_assignments(single.scope(), 3)) {
    CHECK(cnet_log_density(single, x) == clt_log_density(t, x));
    const double expected = x[0] == 0 ? std::log(0.3) + clt_log_density(a, x) : std::log(0.7) + clt_log_density(b, x);
    CHECK(cnet_log_density(split, x) == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK_THROWS_AS(cnet_log_density(split, Assignment{0, 1}), std::invalid_argument);
}

TEST_CASE("cnet_log_density normalizes") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 12;
    const CutsetNetwork net = testing::random_cnet(rng, d, trial % 6, trial % 2 == 0);
    double total = 0.0;
    for (const Assignment& x : testing::all_assignments(net.scope(), d)) total += std::exp(cnet_log_density(net, x));
    CHECK(std::fabs(total - 1.0) <= 1e-10);
  }
}

TEST_CASE("cnet_sample frequencies match the density") {
  Rng rng(23);
  const CutsetNetwork net = testing::random_cnet(rng, 3, 2);
  const int n = 40000;
  std::vector<double> freq(8, 0.0);
  for (int i = 0; i < n; ++i) {
    const Assignment x = cnet_sample(net, rng);
    freq[x[0] * 4 + x[1] * 2 + x[2]] += 1.0 / n;
  }
  for (const Assignment& x : testing::all_assignments(net.scope(), 3)) {
    const double p = std::exp(cnet_log_density(net, x));
    CHECK(std::fabs(freq[x[0] * 4 + x[1] * 2 + x[2]] - p) <= 4.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
  }
}

TEST_CASE("cnet_mpe examples") {
  Rng rng(4);
  const CutsetNetwork net = testing::random_cnet(rng, 6, 3);
  const Evidence full{1, 0, 1, 1, 0, 0};
  const MpeResult r = cnet_mpe(net, full);
  CHECK(r.assignment == Assignment{1, 0, 1, 1, 0, 0});
  CHECK(r.log_density == cnet_log_density(net, r.assignment));

  const ChowLiuTree t = testing::random_tree(rng, {0, 1, 2, 3});
  const Evidence e{kUnobserved, 1, kUnobserved, kUnobserved};
  CHECK(cnet_mpe(CutsetNetwork(t), e).assignment == clt_mpe(t, e).assignment);
  CHECK_THROWS_AS(cnet_mpe(net, Evidence{0, 0, 0, 0, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("cnet_mpe is self-consistent and bounded by the exhaustive maximum") {
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t d = 2 + trial % 9;
    const CutsetNetwork net = testing::random_cnet(rng, d, 1 + trial % 4, trial % 3 == 0);
    Evidence e(d, kUnobserved);
    for (std::size_t v = 0; v < d; ++v) {
      if (uniform01(rng) < 0.4) e[v] = uniform01(rng) < 0.5 ? 0 : 1;
    }
    const MpeResult got = cnet_mpe(net, e);
    CHECK(got.log_density == cnet_log_density(net, got.assignment));
    for (std::size_t v = 0; v < d; ++v) {
      if (e[v] != kUnobserved) CHECK(got.assignment[v] == e[v]);
    }
    const auto ref = testing::brute_force_mpe(net.scope(), d, e,
                                              [&](const Assignment& x) { return cnet_log_density(net, x); });
    CHECK(got.log_density <= ref.log_density);
    // When every decision variable is observed the search reduces to one
    // tree and is exact.
    bool decisions_observed = true;
    for (const CnetNode& node : net.nodes()) {
      if (const auto* dec = std::get_if<DecisionNode>(&node)) decisions_observed &= e[dec->var] != kUnobserved;
    }
    if (decisions_observed) CHECK(testing::close_log(got.log_density, ref.log_density));
  }
}

TEST_CASE("CutsetNetwork validation") {
  Rng rng(1);
  CutsetNetwork net(testing::random_tree(rng, {0, 1, 2}));
  CHECK_THROWS_AS(net.split_leaf(0, 0, {0.5, 0.5}, testing::random_tree(rng, {1}), testing::random_tree(rng, {1, 2})),
                  std::invalid_argument);
  CHECK_THROWS_AS(net.split_leaf(0, 0, {0.6, 0.5}, testing::random_tree(rng, {1, 2}),
                                 testing::random_tree(rng, {1, 2})),
                  std::invalid_argument);
  CHECK_THROWS_AS(net.split_leaf(0, 5, {0.5, 0.5}, testing::random_tree(rng, {1, 2}),
                                 testing::random_tree(rng, {1, 2})),
                  std::invalid_argument);
}
