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

#include "bayespc/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bayespc/circuit.hpp"
#include "bayespc/dataset.hpp"
#include "bayespc/learner.hpp"
#include "bayespc/mixture.hpp"
#include "bayespc/model_io.hpp"

namespace bayespc::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ScoreArgs {
  std::string score = "bd";
  double alpha = 0.1;
  double beta = 0.01;
  std::size_t lambda = 10;

  void add_to(CLI::App* app) {
    app->add_option("--score", score, "Structure score")->check(CLI::IsMember({"bd", "bic"}))->capture_default_str();
    app->add_option("--alpha", alpha, "Equivalent sample size of the BD prior")->capture_default_str();
    app->add_option("--beta", beta, "Laplace smoothing factor for BIC")->capture_default_str();
    app->add_option("--lambda", lambda, "Candidate variables scored per leaf")->capture_default_str();
  }

  LearnerConfig config() const {
    LearnerConfig cfg;
    cfg.score.kind = score == "bic" ? ScoreKind::BIC : ScoreKind::BD;
    cfg.score.alpha = alpha;
    cfg.score.beta = beta;
    cfg.lambda = lambda;
    cfg.validate();
    return cfg;
  }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_row(std::ostream& out, std::span<const int> scope, std::span<const std::uint8_t> x) {
  std::string line;
  for (std::size_t c = 0; c < scope.size(); ++c) {
    if (c) line.push_back(',');
    line.push_back(static_cast<char>('0' + x[scope[c]]));
  }
  out << line;
}

void require_model_scope(const ModelFile& model, const WeightedDataset& d) {
  const auto scope = model_scope(model);
  if (!std::equal(scope.begin(), scope.end(), d.variable_ids().begin(), d.variable_ids().end())) {
    throw std::invalid_argument("data has " + std::to_string(d.cols()) + " columns but the model covers " +
                                std::to_string(scope.size()) + " variables");
  }
}

// --- learn ---------------------------------------------------------------

struct LearnArgs {
  std::string train;
  std::string out = "model.json";
  std::string circuit_out;
  std::uint64_t seed = 0;
  ScoreArgs score;
};

int cmd_learn(const LearnArgs& args, std::ostream& out) {
  const LearnerConfig cfg = args.score.config();
  const WeightedDataset train = load_csv(args.train);
  const auto start = Clock::now();
  LearnerConfig used = cfg;
  if (used.score.kind == ScoreKind::BIC) used.score.root_dataset_size = train.total_weight();
  CutsetNetwork net = learn_cnet(train, used);
  const double elapsed = seconds_since(start);

  const double ll = cnet_log_likelihood(net, train) / train.total_weight();
  const double score = structure_score(net, train, used.score);
  const Circuit circuit = compile(net);
  const CircuitSize size = circuit_size(circuit);
  if (!args.circuit_out.empty()) {
    std::ofstream file = open_output(args.circuit_out);
    write_circuit(file, circuit);
  }
  out << "train_ll_per_sample=" << num(ll) << " score=" << num(score) << " decisions=" << net.decision_count()
      << " leaves=" << net.leaf_count() << " circuit_nodes=" << size.nodes << " circuit_params=" << size.params
      << " wall_time_s=" << short_num(elapsed) << "\n";
  save_model(args.out, ModelFile{used, std::move(net), {fs::path(args.train).filename().string(), args.seed, elapsed}});
  return kExitOk;
}

// --- learn-mixture -------------------------------------------------------

struct MixtureArgs {
  std::string train;
  std::string valid;
  std::string out = "mixture.json";
  std::vector<std::size_t> ks{2, 3, 5, 8, 10, 20};
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  double tol = 1e-4;
  ScoreArgs score;
};

int cmd_learn_mixture(const MixtureArgs& args, std::ostream& out) {
  const LearnerConfig cfg = args.score.config();
  const WeightedDataset train = load_csv(args.train);
  const WeightedDataset valid = load_csv(args.valid);
  if (!std::equal(train.variable_ids().begin(), train.variable_ids().end(), valid.variable_ids().begin(),
                  valid.variable_ids().end())) {
    throw std::invalid_argument("train and validation files have different widths");
  }
  std::optional<ModelFile> best;
  double best_valid = kLogZero;
  std::size_t best_k = 0;
  out << "K,train_ll_per_sample,valid_ll_per_sample,learn_time_s\n";
  for (std::size_t K : args.ks) {
    Rng rng(args.seed);
    const auto start = Clock::now();
    SemResult sem = learn_sem(train, K, cfg, rng, {args.max_iters, args.tol});
    const double elapsed = seconds_since(start);
    const double valid_ll = mixture_log_likelihood(sem.mixture, valid) / valid.total_weight();
    out << K << ',' << num(sem.best_ll) << ',' << num(valid_ll) << ',' << short_num(elapsed) << "\n";
    if (!best || valid_ll > best_valid) {
      best_valid = valid_ll;
      best_k = K;
      best = ModelFile{cfg, std::move(sem.mixture), {fs::path(args.train).filename().string(), args.seed, elapsed}};
    }
  }
  out << "selected_K=" << best_k << " valid_ll_per_sample=" << num(best_valid) << "\n";
  save_model(args.out, *best);
  return kExitOk;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string data;
  bool via_circuit = false;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  const ModelFile model = load_model(args.model);
  const WeightedDataset data = load_csv(args.data);
  require_model_scope(model, data);

  std::vector<Circuit> circuits;
  std::vector<double> log_weights;
  if (args.via_circuit) {
    if (const auto* mix = std::get_if<Mixture>(&model.model)) {
      for (std::size_t k = 0; k < mix->size(); ++k) {
        circuits.push_back(compile(mix->component(k)));
        log_weights.push_back(mix->weights()[k] > 0.0 ? std::log(mix->weights()[k]) : kLogZero);
      }
    } else {
      circuits.push_back(compile(std::get<CutsetNetwork>(model.model)));
      log_weights.push_back(0.0);
    }
  }

  double total = 0.0;
  std::vector<double> terms;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const Assignment x = data.assignment(r);
    double lp;
    if (!args.via_circuit) {
      lp = model_log_density(model, x);
    } else if (!model.is_mixture()) {
      lp = circuit_log_density(circuits.front(), x);
    } else {
      terms.clear();
      for (std::size_t k = 0; k < circuits.size(); ++k) {
        terms.push_back(log_weights[k] == kLogZero ? kLogZero : log_weights[k] + circuit_log_density(circuits[k], x));
      }
      lp = log_sum_exp(terms);
    }
    if (data.weight(r) != 0.0) total += data.weight(r) * lp;
  }
  out << "mean_ll=" << num(total / data.total_weight()) << " total_ll=" << num(total) << " rows=" << data.rows()
      << "\n";
  return kExitOk;
}

// --- sample / mpe --------------------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t n = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sample(const SampleArgs& args, std::ostream& out) {
  const ModelFile model = load_model(args.model);
  std::ofstream file;
  if (!args.out.empty()) file = open_output(args.out);
  std::ostream& sink = args.out.empty() ? out : file;
  Rng rng(args.seed);
  const auto scope = model_scope(model);
  for (std::size_t i = 0; i < args.n; ++i) {
    const Assignment x = model.is_mixture() ? mixture_sample(std::get<Mixture>(model.model), rng)
                                            : cnet_sample(std::get<CutsetNetwork>(model.model), rng);
    write_row(sink, scope, x);
    sink << "\n";
  }
  return kExitOk;
}

struct MpeArgs {
  std::string model;
  std::string evidence;
  std::string out;
};

int cmd_mpe(const MpeArgs& args, std::ostream& out) {
  const ModelFile model = load_model(args.model);
  const auto scope = model_scope(model);
  std::ifstream in(args.evidence);
  if (!in) throw IoError("cannot open " + args.evidence);
  const std::vector<Evidence> rows = read_evidence(in, scope.size(), args.evidence);
  std::ofstream file;
  if (!args.out.empty()) file = open_output(args.out);
  std::ostream& sink = args.out.empty() ? out : file;
  for (const Evidence& local : rows) {
    Evidence e(static_cast<std::size_t>(scope.back()) + 1, kUnobserved);
    for (std::size_t c = 0; c < scope.size(); ++c) e[scope[c]] = local[c];
    const MpeResult r = model.is_mixture() ? mixture_mpe(std::get<Mixture>(model.model), e)
                                           : cnet_mpe(std::get<CutsetNetwork>(model.model), e);
    write_row(sink, scope, r.assignment);
    sink << ',' << num(r.log_density) << "\n";
  }
  return kExitOk;
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
  std::string dir;
  std::vector<std::string> methods{"bd", "bic"};
  std::string out;
  bool omit_timing = false;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchArgs& args, std::ostream& out) {
  if (!fs::is_directory(args.dir)) throw IoError("not a directory: " + args.dir);
  std::vector<std::string> names;
  const std::string suffix = ".ts.data";
  for (const auto& entry : fs::directory_iterator(args.dir)) {
    const std::string file = entry.path().filename().string();
    if (file.size() > suffix.size() && file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  std::sort(names.begin(), names.end());
  std::vector<std::string> methods = args.methods;
  std::sort(methods.begin(), methods.end());

  std::ofstream file;
  if (!args.out.empty()) file = open_output(args.out);
  std::ostream& sink = args.out.empty() ? out : file;
  sink << "dataset,method,train_time_s,test_ll_nats,circuit_params\n";
  for (const std::string& name : names) {
    const fs::path base = fs::path(args.dir) / name;
    WeightedDataset train = load_csv(base.string() + ".ts.data");
    const fs::path valid_path = base.string() + ".valid.data";
    // No model selection happens here, so validation rows are training rows.
    if (fs::exists(valid_path)) train = concatenate(train, load_csv(valid_path));
    const WeightedDataset test = load_csv(base.string() + ".test.data");
    for (const std::string& method : methods) {
      ScoreArgs score;
      score.score = method;
      LearnerConfig cfg = score.config();
      const auto start = Clock::now();
      const CutsetNetwork net = learn_cnet(train, cfg);
      const double elapsed = seconds_since(start);
      const double test_ll = cnet_log_likelihood(net, test) / test.total_weight();
      sink << name << ',' << method << ',' << (args.omit_timing ? std::string("NA") : short_num(elapsed)) << ','
           << num(test_ll) << ',' << circuit_size(compile(net)).params << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

std::vector<Evidence> read_evidence(std::istream& in, std::size_t width, const std::string& source) {
  std::vector<Evidence> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Evidence e;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      if (cell == "0") {
        e.push_back(0);
      } else if (cell == "1") {
        e.push_back(1);
      } else if (cell == "?") {
        e.push_back(kUnobserved);
      } else {
        throw ParseError(source, line_no, "expected 0, 1 or ?, got '" + cell + "'");
      }
    }
    if (!line.empty() && line.back() == ',') throw ParseError(source, line_no, "trailing comma");
    if (e.size() != width) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(width) + " cells, got " + std::to_string(e.size()));
    }
    rows.push_back(std::move(e));
  }
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score-guided structure learning of cutset networks"};
  app.require_subcommand(1);

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "Learn one cutset network from a training file");
  learn_cmd->add_option("train", learn.train, "Training data (comma-separated 0/1 rows)")->required();
  learn_cmd->add_option("-o,--out", learn.out, "Model file to write")->capture_default_str();
  learn_cmd->add_option("--circuit-out", learn.circuit_out, "Also write the compiled circuit as text");
  learn_cmd->add_option("--seed", learn.seed, "Recorded in the model provenance")->capture_default_str();
  learn.score.add_to(learn_cmd);

  MixtureArgs mix;
  auto* mix_cmd = app.add_subcommand("learn-mixture", "Learn mixtures by structural EM, choosing K on validation data");
  mix_cmd->add_option("train", mix.train, "Training data")->required();
  mix_cmd->add_option("valid", mix.valid, "Validation data")->required();
  mix_cmd->add_option("-k,--components", mix.ks, "Comma-separated component counts")->delimiter(',')->capture_default_str();
  mix_cmd->add_option("-o,--out", mix.out, "Model file to write")->capture_default_str();
  mix_cmd->add_option("--seed", mix.seed, "Seed for k-means initialization")->capture_default_str();
  mix_cmd->add_option("--max-iters", mix.max_iters, "EM iteration cap")->capture_default_str();
  mix_cmd->add_option("--tol", mix.tol, "Stop when train LL per sample improves by less")->capture_default_str();
  mix.score.add_to(mix_cmd);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Mean and total log-likelihood (nats) of a data file");
  eval_cmd->add_option("model", eval.model, "Model file")->required();
  eval_cmd->add_option("data", eval.data, "Data file")->required();
  eval_cmd->add_flag("--via-circuit", eval.via_circuit, "Evaluate the compiled circuit instead of the network");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw samples as CSV rows");
  sample_cmd->add_option("model", sample.model, "Model file")->required();
  sample_cmd->add_option("-n,--count", sample.n, "Number of samples")->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
  sample_cmd->add_option("-o,--out", sample.out, "Output CSV (default: stdout)");

  MpeArgs mpe;
  auto* mpe_cmd = app.add_subcommand("mpe", "Complete rows with ? cells by approximate MPE");
  mpe_cmd->add_option("model", mpe.model, "Model file")->required();
  mpe_cmd->add_option("evidence", mpe.evidence, "CSV of 0, 1 and ? cells")->required();
  mpe_cmd->add_option("-o,--out", mpe.out, "Output CSV (default: stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Learn and test every <name>.ts.data triplet in a directory");
  bench_cmd->add_option("dir", bench.dir, "Dataset directory")->required();
  bench_cmd->add_option("--methods", bench.methods, "Scores to run")->delimiter(',')->check(CLI::IsMember({"bd", "bic"}))->capture_default_str();
  bench_cmd->add_option("-o,--out", bench.out, "Output CSV (default: stdout)");
  bench_cmd->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
  bench_cmd->add_flag("--omit-timing", bench.omit_timing, "Write NA for train_time_s so reruns are byte-identical");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*learn_cmd) return cmd_learn(learn, out);
    if (*mix_cmd) return cmd_learn_mixture(mix, out);
    if (*eval_cmd) return cmd_eval(eval, out);
    if (*sample_cmd) return cmd_sample(sample, out);
    if (*mpe_cmd) return cmd_mpe(mpe, out);
    if (*bench_cmd) return cmd_bench(bench, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bayespc::cli
