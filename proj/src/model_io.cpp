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

#include "bayespc/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bayespc {

namespace {

using Json = nlohmann::ordered_json;

Json node_to_json(const CutsetNetwork& net, std::size_t index) {
  Json j;
  if (const auto* leaf = std::get_if<LeafNode>(&net.node(index))) {
    const ChowLiuTree& t = leaf->tree;
    j["type"] = "leaf";
    j["vars"] = std::vector<int>(t.variable_ids().begin(), t.variable_ids().end());
    j["parents"] = std::vector<int>(t.parents().begin(), t.parents().end());
    Json cpt = Json::array();
    for (const auto& rows : t.cpt()) {
      Json r = Json::array();
      for (const auto& row : rows) r.push_back({row[0], row[1]});
      cpt.push_back(std::move(r));
    }
    j["cpt"] = std::move(cpt);
    return j;
  }
  const auto& dec = std::get<DecisionNode>(net.node(index));
  j["type"] = "decision";
  j["var"] = dec.var;
  j["weights"] = {dec.weights[0], dec.weights[1]};
  j["children"] = {node_to_json(net, dec.children[0]), node_to_json(net, dec.children[1])};
  return j;
}

Json cnet_to_json(const CutsetNetwork& net) {
  Json j;
  j["scope"] = std::vector<int>(net.scope().begin(), net.scope().end());
  j["root"] = node_to_json(net, net.root());
  return j;
}

// Appends the subtree in preorder and returns its index.
std::size_t node_from_json(const Json& j, std::vector<CnetNode>& nodes) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "leaf") {
    std::vector<std::vector<ChowLiuTree::Row>> cpt;
    for (const auto& rows : j.at("cpt")) {
      std::vector<ChowLiuTree::Row> r;
      for (const auto& row : rows) r.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
      cpt.push_back(std::move(r));
    }
    nodes.emplace_back(LeafNode{ChowLiuTree(j.at("vars").get<std::vector<int>>(),
                                            j.at("parents").get<std::vector<int>>(), std::move(cpt))});
    return nodes.size() - 1;
  }
  if (type != "decision") throw std::runtime_error("model file: unknown node type '" + type + "'");
  const std::size_t index = nodes.size();
  const auto& children = j.at("children");
  if (children.size() != 2) throw std::runtime_error("model file: decision needs two children");
  nodes.emplace_back(DecisionNode{j.at("var").get<int>(),
                                  {j.at("weights").at(0).get<double>(), j.at("weights").at(1).get<double>()},
                                  {0, 0}});
  const std::size_t c0 = node_from_json(children[0], nodes);
  const std::size_t c1 = node_from_json(children[1], nodes);
  std::get<DecisionNode>(nodes[index]).children = {c0, c1};
  return index;
}

CutsetNetwork cnet_from_json(const Json& j) {
  std::vector<CnetNode> nodes;
  const std::size_t root = node_from_json(j.at("root"), nodes);
  return CutsetNetwork(j.at("scope").get<std::vector<int>>(), std::move(nodes), root);
}

}  // namespace

std::string to_json(const ModelFile& file) {
  Json j;
  j["format_version"] = ModelFile::kFormatVersion;
  j["kind"] = file.is_mixture() ? "mixture" : "cnet";
  Json score;
  score["kind"] = file.config.score.kind == ScoreKind::BD ? "bd" : "bic";
  score["alpha"] = file.config.score.alpha;
  score["beta"] = file.config.score.beta;
  score["lambda"] = file.config.lambda;
  if (file.config.score.root_dataset_size) score["root_dataset_size"] = *file.config.score.root_dataset_size;
  j["score"] = std::move(score);
  j["provenance"] = {{"dataset", file.provenance.dataset},
                     {"seed", file.provenance.seed},
                     {"wall_time_s", file.provenance.wall_time_s}};
  if (const auto* mix = std::get_if<Mixture>(&file.model)) {
    Json components = Json::array();
    for (const auto& c : mix->components()) components.push_back(cnet_to_json(c));
    j["mixture"] = {{"weights", std::vector<double>(mix->weights().begin(), mix->weights().end())},
                    {"components", std::move(components)}};
  } else {
    j["cnet"] = cnet_to_json(std::get<CutsetNetwork>(file.model));
  }
  return j.dump(1) + "\n";
}

ModelFile model_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != ModelFile::kFormatVersion) {
      throw std::runtime_error("model file: unsupported format_version " + std::to_string(version));
    }
    LearnerConfig cfg;
    const auto& score = j.at("score");
    const std::string kind = score.at("kind").get<std::string>();
    if (kind != "bd" && kind != "bic") throw std::runtime_error("model file: unknown score kind '" + kind + "'");
    cfg.score.kind = kind == "bd" ? ScoreKind::BD : ScoreKind::BIC;
    cfg.score.alpha = score.at("alpha").get<double>();
    cfg.score.beta = score.at("beta").get<double>();
    cfg.lambda = score.at("lambda").get<std::size_t>();
    if (score.contains("root_dataset_size")) cfg.score.root_dataset_size = score["root_dataset_size"].get<double>();

    Provenance prov;
    const auto& p = j.at("provenance");
    prov.dataset = p.at("dataset").get<std::string>();
    prov.seed = p.at("seed").get<std::uint64_t>();
    prov.wall_time_s = p.at("wall_time_s").get<double>();

    const std::string model_kind = j.at("kind").get<std::string>();
    if (model_kind == "cnet") return ModelFile{cfg, cnet_from_json(j.at("cnet")), prov};
    if (model_kind != "mixture") throw std::runtime_error("model file: unknown kind '" + model_kind + "'");
    std::vector<CutsetNetwork> components;
    for (const auto& c : j.at("mixture").at("components")) components.push_back(cnet_from_json(c));
    return ModelFile{cfg,
                     Mixture(std::move(components), j.at("mixture").at("weights").get<std::vector<double>>()),
                     prov};
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(file);
  if (!out) throw IoError("failed writing " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

LogScore model_log_density(const ModelFile& file, std::span<const std::uint8_t> x) {
  if (const auto* mix = std::get_if<Mixture>(&file.model)) return mixture_log_density(*mix, x);
  return cnet_log_density(std::get<CutsetNetwork>(file.model), x);
}

std::span<const int> model_scope(const ModelFile& file) {
  if (const auto* mix = std::get_if<Mixture>(&file.model)) return mix->scope();
  return std::get<CutsetNetwork>(file.model).scope();
}

}  // namespace bayespc
