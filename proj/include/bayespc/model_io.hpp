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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include "bayespc/cutset.hpp"
#include "bayespc/learner.hpp"
#include "bayespc/mixture.hpp"

namespace bayespc {

struct Provenance {
  std::string dataset;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

/// A learned model plus the settings that produced it.
///
/// On disk this is a JSON document:
///   { "format_version": 1, "kind": "cnet" | "mixture",
///     "score": { "kind": "bd" | "bic", "alpha", "beta", "lambda",
///                ["root_dataset_size"] },
///     "provenance": { "dataset", "seed", "wall_time_s" },
///     "cnet": <net> | "mixture": { "weights": [...], "components": [<net>...] } }
///   <net>  = { "scope": [ids], "root": <node> }
///   <node> = { "type": "decision", "var", "weights": [w0, w1], "children": [<node>, <node>] }
///          | { "type": "leaf", "vars": [ids], "parents": [local index or -1],
///              "cpt": [[[p0, p1]], [[p0, p1], [p0, p1]], ...] }
/// Doubles are written with round-trip precision, so load(save(m)) evaluates
/// bitwise identically and save(load(save(m))) == save(m).
struct ModelFile {
  static constexpr int kFormatVersion = 1;

  LearnerConfig config;
  std::variant<CutsetNetwork, Mixture> model;
  Provenance provenance;

  bool is_mixture() const { return std::holds_alternative<Mixture>(model); }
};

std::string to_json(const ModelFile& file);

/// Throws std::runtime_error on malformed documents and std::invalid_argument
/// if the decoded model violates its invariants.
ModelFile model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

/// ln p(x) under either model kind.
LogScore model_log_density(const ModelFile& file, std::span<const std::uint8_t> x);

/// The model's variable scope.
std::span<const int> model_scope(const ModelFile& file);

}  // namespace bayespc
