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

#include "bayespc/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "bayespc/numerics.hpp"

namespace bayespc {

namespace {

constexpr std::size_t kKmeansMaxIters = 100;
constexpr double kKmeansMinMove = 1e-6;
constexpr double kWeightTolerance = 1e-12;

double squared_distance(std::span<const std::uint8_t> x, std::span<const double> centroid) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double diff = static_cast<double>(x[c]) - centroid[c];
    s += diff * diff;
  }
  return s;
}

// Index drawn with probability proportional to `mass`; uniform if all zero.
std::size_t draw(std::span<const double> mass, Rng& rng) {
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > 0.0)) return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(mass.size()));
  double target = uniform01(rng) * total;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (target < mass[i]) return i;
    target -= mass[i];
  }
  // Rounding left a sliver of mass; take the last candidate with mass.
  for (std::size_t i = mass.size(); i-- > 0;) {
    if (mass[i] > 0.0) return i;
  }
  return mass.size() - 1;
}

std::size_t distinct_rows(const WeightedDataset& d) {
  std::set<std::vector<std::uint8_t>> seen;
  for (std::size_t r = 0; r < d.rows(); ++r) seen.emplace(d.row(r).begin(), d.row(r).end());
  return seen.size();
}

std::vector<WeightedDataset> split_by_label(const WeightedDataset& d, std::span<const std::size_t> label,
                                            std::size_t K) {
  std::vector<std::vector<std::size_t>> members(K);
  for (std::size_t r = 0; r < d.rows(); ++r) members[label[r]].push_back(r);
  std::vector<WeightedDataset> out;
  for (const auto& idx : members) out.push_back(d.select_rows(idx));
  return out;
}

std::vector<std::size_t> lloyd(const WeightedDataset& d, std::size_t K, Rng& rng) {
  const std::size_t N = d.rows();
  const std::size_t m = d.cols();
  std::vector<std::vector<double>> centroids;
  auto as_centroid = [&](std::size_t r) {
    std::vector<double> c(m);
    for (std::size_t j = 0; j < m; ++j) c[j] = d.at(r, j);
    return c;
  };

  // k-means++ seeding.
  std::vector<double> mass(d.weights().begin(), d.weights().end());
  centroids.push_back(as_centroid(draw(mass, rng)));
  std::vector<double> nearest(N, std::numeric_limits<double>::infinity());
  while (centroids.size() < K) {
    for (std::size_t r = 0; r < N; ++r) {
      nearest[r] = std::min(nearest[r], squared_distance(d.row(r), centroids.back()));
      mass[r] = d.weight(r) * nearest[r];
    }
    if (!(std::accumulate(mass.begin(), mass.end(), 0.0) > 0.0)) {
      // Only zero-weight rows are left uncovered: seed from any uncovered row.
      for (std::size_t r = 0; r < N; ++r) mass[r] = nearest[r] > 0.0 ? 1.0 : 0.0;
    }
    centroids.push_back(as_centroid(draw(mass, rng)));
  }

  std::vector<std::size_t> label(N, 0);
  for (std::size_t iter = 0; iter < kKmeansMaxIters; ++iter) {
    for (std::size_t r = 0; r < N; ++r) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < K; ++k) {
        const double dist = squared_distance(d.row(r), centroids[k]);
        if (dist < best) {
          best = dist;
          label[r] = k;
        }
      }
    }
    std::vector<std::vector<double>> sums(K, std::vector<double>(m, 0.0));
    std::vector<double> mass_of(K, 0.0);
    for (std::size_t r = 0; r < N; ++r) {
      const double w = d.weight(r);
      mass_of[label[r]] += w;
      for (std::size_t j = 0; j < m; ++j) sums[label[r]][j] += w * d.at(r, j);
    }
    double moved = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!(mass_of[k] > 0.0)) continue;  // keep the old centroid
      double shift = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double updated = sums[k][j] / mass_of[k];
        shift += (updated - centroids[k][j]) * (updated - centroids[k][j]);
        centroids[k][j] = updated;
      }
      moved = std::max(moved, std::sqrt(shift));
    }
    if (moved < kKmeansMinMove) break;
  }

  // Refill empty clusters from the largest cluster's worst-fitting row.
  std::vector<std::size_t> sizes(K, 0);
  for (std::size_t r = 0; r < N; ++r) ++sizes[label[r]];
  for (std::size_t k = 0; k < K; ++k) {
    if (sizes[k] > 0) continue;
    const std::size_t donor =
        static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::size_t worst = N;
    double worst_dist = -1.0;
    for (std::size_t r = 0; r < N; ++r) {
      if (label[r] != donor) continue;
      const double dist = squared_distance(d.row(r), centroids[donor]);
      if (dist > worst_dist) {
        worst_dist = dist;
        worst = r;
      }
    }
    label[worst] = k;
    --sizes[donor];
    ++sizes[k];
  }
  return label;
}

}  // namespace

Mixture::Mixture(std::vector<CutsetNetwork> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw std::invalid_argument("Mixture: no components");
  if (weights_.size() != components_.size()) {
    throw std::invalid_argument("Mixture: one weight per component required");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("Mixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) throw std::invalid_argument("Mixture: weights do not sum to 1");
  const auto scope = components_.front().scope();
  for (const auto& c : components_) {
    if (!std::equal(scope.begin(), scope.end(), c.scope().begin(), c.scope().end())) {
      throw std::invalid_argument("Mixture: components must share one scope");
    }
  }
}

LogScore mixture_log_density(const Mixture& m, std::span<const std::uint8_t> x) {
  std::vector<double> terms(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    terms[k] = m.weights()[k] > 0.0 ? std::log(m.weights()[k]) + cnet_log_density(m.component(k), x)
                                    : kLogZero;
  }
  return log_sum_exp(terms);
}

LogScore mixture_log_likelihood(const Mixture& m, const WeightedDataset& d) {
  if (!std::equal(m.scope().begin(), m.scope().end(), d.variable_ids().begin(), d.variable_ids().end())) {
    throw std::invalid_argument("mixture_log_likelihood: dataset variables differ from the mixture scope");
  }
  double ll = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    if (d.weight(r) == 0.0) continue;
    ll += d.weight(r) * mixture_log_density(m, d.assignment(r));
  }
  return ll;
}

Assignment mixture_sample(const Mixture& m, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t pick = m.size() - 1;
  for (std::size_t k = 0; k < m.size(); ++k) {
    acc += m.weights()[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  while (m.weights()[pick] == 0.0 && pick > 0) --pick;
  return cnet_sample(m.component(pick), rng);
}

MpeResult mixture_mpe(const Mixture& m, const Evidence& evidence) {
  MpeResult best;
  double best_value = kLogZero;
  for (std::size_t k = 0; k < m.size(); ++k) {
    MpeResult candidate = cnet_mpe(m.component(k), evidence);
    const double value =
        m.weights()[k] > 0.0 ? std::log(m.weights()[k]) + candidate.log_density : kLogZero;
    if (k == 0 || value > best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  best.log_density = mixture_log_density(m, best.assignment);
  return best;
}

std::vector<WeightedDataset> kmeans_init(const WeightedDataset& d, std::size_t K, Rng& rng) {
  if (K < 1) throw std::invalid_argument("kmeans_init: K must be at least 1");
  if (K > d.rows()) throw std::invalid_argument("kmeans_init: more clusters than rows");
  std::vector<std::size_t> label(d.rows(), 0);
  if (K > 1) {
    if (K > distinct_rows(d)) {
      for (std::size_t r = 0; r < d.rows(); ++r) label[r] = r % K;
    } else {
      label = lloyd(d, K, rng);
    }
  }
  return split_by_label(d, label, K);
}

Responsibilities e_step(const Mixture& m, const WeightedDataset& d) {
  Responsibilities gamma{d.rows(), m.size(), std::vector<double>(d.rows() * m.size(), 0.0)};
  std::vector<double> terms(m.size());
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const Assignment x = d.assignment(r);
    for (std::size_t k = 0; k < m.size(); ++k) {
      terms[k] = m.weights()[k] > 0.0 ? std::log(m.weights()[k]) + cnet_log_density(m.component(k), x)
                                      : kLogZero;
    }
    const double norm = log_sum_exp(terms);
    if (norm == kLogZero) {
      throw std::runtime_error("e_step: row " + std::to_string(r) + " has zero density under every component");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) total += gamma.values[r * m.size() + k] = std::exp(terms[k] - norm);
    for (std::size_t k = 0; k < m.size(); ++k) gamma.values[r * m.size() + k] /= total;
  }
  return gamma;
}

Mixture m_step(const WeightedDataset& d, const Responsibilities& gamma, const LearnerConfig& cfg) {
  if (gamma.rows != d.rows() || gamma.components == 0) {
    throw std::invalid_argument("m_step: responsibilities do not match the dataset");
  }
  if (!(d.total_weight() > 0.0)) throw std::invalid_argument("m_step: dataset has zero total weight");
  const std::size_t K = gamma.components;
  std::vector<CutsetNetwork> components;
  std::vector<double> a(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> w(d.rows());
    double mass = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      w[r] = d.weight(r) * gamma.at(r, k);
      mass += w[r];
    }
    a[k] = std::max(mass / d.total_weight(), 0.0);
    if (mass > 0.0) {
      components.push_back(learn_cnet(d.with_weights(std::move(w)), cfg));
      continue;
    }
    std::size_t pick = 0;
    double top = -1.0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      const double h = entropy(gamma.row(r));
      if (h > top) {
        top = h;
        pick = r;
      }
    }
    const std::size_t only[] = {pick};
    components.push_back(learn_cnet(d.select_rows(only).with_weights({1.0}), cfg));
  }
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  for (double& ak : a) ak /= total;
  return Mixture(std::move(components), std::move(a));
}

SemResult learn_sem(const WeightedDataset& d, std::size_t K, const LearnerConfig& cfg, Rng& rng,
                    const SemOptions& options) {
  if (!(d.total_weight() > 0.0)) throw std::invalid_argument("learn_sem: dataset has zero total weight");
  const std::vector<WeightedDataset> clusters = kmeans_init(d, K, rng);
  std::vector<CutsetNetwork> components;
  std::vector<double> a;
  for (const WeightedDataset& cluster : clusters) {
    if (cluster.total_weight() > 0.0) {
      components.push_back(learn_cnet(cluster, cfg));
    } else {
      components.push_back(learn_cnet(cluster.with_weights(std::vector<double>(cluster.rows(), 1.0)), cfg));
    }
    a.push_back(cluster.total_weight() / d.total_weight());
  }
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  for (double& ak : a) ak /= total;

  Mixture current(std::move(components), std::move(a));
  double ll = mixture_log_likelihood(current, d) / d.total_weight();
  SemResult result{current, ll, ll, {ll}};
  double previous = ll;
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    current = m_step(d, e_step(current, d), cfg);
    ll = mixture_log_likelihood(current, d) / d.total_weight();
    result.ll_history.push_back(ll);
    if (ll > result.best_ll) {
      result.best_ll = ll;
      result.mixture = current;
    }
    if (ll - previous < options.tol) break;
    previous = ll;
  }
  return result;
}

}  // namespace bayespc
