// Copyright 2026 The MACH Authors
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

// Command-line front end: plan, train, predict, evaluate, sketch.
//
// Exit codes: 0 success, 1 usage, 2 data or validation, 3 I/O or format.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mach/dataio.hpp"
#include "mach/decoder.hpp"
#include "mach/errors.hpp"
#include "mach/hashing.hpp"
#include "mach/planner.hpp"
#include "mach/random.hpp"
#include "mach/sketch.hpp"
#include "mach/train.hpp"

namespace {

using namespace mach;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

// Stream reserved for the feature-hash seed; repetition streams are 0..R-1.
constexpr std::uint64_t kFeatureStream = ~std::uint64_t{0};
constexpr std::uint64_t kTokenDomain = (std::uint64_t{1} << 31) - 1;

struct UsageError : Error {
  using Error::Error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Estimator estimator_flag(const std::string& name) {
  const auto est = parse_estimator(name);
  if (!est) throw UsageError("unknown estimator '" + name + "'");
  return *est;
}

std::vector<SparseVector> model_inputs(const io::Dataset& data,
                                       const MachConfig& cfg) {
  std::vector<SparseVector> xs;
  xs.reserve(data.samples.size());
  for (const auto& s : data.samples) {
    xs.push_back(cfg.source_dim == 0
                     ? s.features
                     : feature_hash(s.features, cfg.input_dim,
                                    derive_seed(cfg.seed, kFeatureStream)));
  }
  return xs;
}

io::Dataset load_for(const MachConfig& cfg, const std::string& path,
                     bool one_based) {
  io::DatasetOptions opts;
  opts.expect_dim = cfg.source_dim == 0 ? cfg.input_dim : cfg.source_dim;
  opts.one_based = one_based;
  return io::load_dataset(path, opts);
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::uint64_t classes = 0;
  std::vector<std::uint64_t> buckets;
  double delta = 0.01;
  std::uint64_t dim = 1;
  std::uint64_t hidden = 0;
};

int run_plan(const PlanArgs& a) {
  if (a.classes < 2) throw UsageError("--classes must be >= 2");
  if (!(a.delta > 0.0 && a.delta < 1.0)) {
    throw UsageError("--delta must lie in (0, 1)");
  }
  std::vector<std::uint64_t> sweep = a.buckets;
  if (sweep.empty()) {
    for (std::uint64_t b = 2; b <= std::max<std::uint64_t>(a.classes, 2) && b <= (1u << 16); b *= 2) {
      sweep.push_back(b);
    }
  }
  const auto vanilla = planner::vanilla_cost(a.classes, a.dim, a.hidden);
  std::cout << "classes=" << a.classes << " dim=" << a.dim
            << " hidden=" << a.hidden << " delta=" << fmt(a.delta)
            << " vanilla_params=" << vanilla.parameters
            << " vanilla_bytes=" << vanilla.model_bytes << '\n';
  for (const auto b : sweep) {
    if (b < 2) throw UsageError("--buckets must be >= 2");
    const auto r = planner::required_r(a.classes, b, a.delta);
    const auto cost = planner::cost_model(a.classes, b, r, a.dim, a.hidden);
    std::cout << "buckets=" << b << " reps=" << r
              << " any_pair_bound=" << fmt(planner::any_pair_bound(a.classes, b, r))
              << " params=" << cost.parameters
              << " bytes=" << cost.model_bytes
              << " inference_mults=" << cost.inference_multiplications
              << " last_layer_reduction="
              << fmt(planner::last_layer_reduction(a.classes, b, r))
              << " param_reduction="
              << fmt(planner::parameter_reduction(a.classes, b, r, a.dim, a.hidden))
              << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string model;
  std::string log;
  std::uint64_t buckets = 32;
  std::optional<std::uint64_t> reps;
  double delta = 0.01;
  std::string mode = "multiclass";
  std::uint64_t hidden = 0;
  std::uint64_t epochs = 10;
  double lr = 0.1;
  std::uint64_t batch = 64;
  std::uint64_t seed = 0;
  int threads = 0;
  std::uint64_t feature_hash_dim = 0;
  bool one_based = false;
};

int run_train(const TrainArgs& a) {
  const auto mode = parse_mode(a.mode);
  if (!mode) throw UsageError("unknown mode '" + a.mode + "'");
  if (a.threads < 0) throw UsageError("--threads must be >= 0");

  io::DatasetOptions opts;
  opts.one_based = a.one_based;
  io::Dataset data = io::load_dataset(a.data, opts);

  MachConfig cfg;
  cfg.num_classes = data.num_labels;
  cfg.buckets = a.buckets;
  cfg.repetitions =
      a.reps ? *a.reps : planner::required_r(data.num_labels, a.buckets, a.delta);
  cfg.mode = *mode;
  cfg.hidden_units = a.hidden;
  cfg.seed = a.seed;
  cfg.epochs = a.epochs;
  cfg.learning_rate = a.lr;
  cfg.batch_size = a.batch;
  cfg.input_dim = data.num_features;
  if (a.feature_hash_dim != 0) {
    cfg.source_dim = data.num_features;
    cfg.input_dim = a.feature_hash_dim;
  }
  cfg.validate();

  if (cfg.source_dim != 0) {
    const auto xs = model_inputs(data, cfg);
    for (std::size_t i = 0; i < xs.size(); ++i) data.samples[i].features = xs[i];
  }

  TrainOptions options;
  options.threads = a.threads;
  TrainLog log;
  const MachModel model = train(data.samples, cfg, options, &log);
  io::save_model(model, a.model);

  std::ofstream log_file;
  if (!a.log.empty()) {
    log_file.open(a.log);
    if (!log_file) throw IoError("cannot write " + a.log);
  }
  std::ostream& out = a.log.empty() ? std::cout : log_file;
  for (std::size_t j = 0; j < log.epoch_loss.size(); ++j) {
    for (std::size_t e = 0; e < log.epoch_loss[j].size(); ++e) {
      out << "rep=" << j << " epoch=" << e + 1
          << " loss=" << fmt(log.epoch_loss[j][e]) << '\n';
    }
  }
  std::cout << "model=" << a.model << " classes=" << cfg.num_classes
            << " buckets=" << cfg.buckets << " reps=" << cfg.repetitions
            << " mode=" << to_string(cfg.mode)
            << " params=" << model.num_parameters() << '\n';
  return 0;
}

// -------------------------------------------------------------- predict

struct PredictArgs {
  std::string model;
  std::string data;
  std::uint64_t topk = 5;
  std::string estimator = "unbiased";
  int threads = 0;
  bool one_based = false;
};

int run_predict(const PredictArgs& a) {
  const Estimator est = estimator_flag(a.estimator);
  const MachModel model = io::load_model(a.model);
  const auto& cfg = model.config();
  if (a.topk < 1 || a.topk > cfg.num_classes) {
    throw UsageError("--topk must lie in [1, " +
                     std::to_string(cfg.num_classes) + "]");
  }
  const auto data = load_for(cfg, a.data, a.one_based);
  const auto xs = model_inputs(data, cfg);
  const auto ranked = top_k_batch(model, xs, est, a.topk, a.threads);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::cout << i << ':';
    for (std::size_t t = 0; t < ranked[i].size(); ++t) {
      std::cout << (t == 0 ? " " : ",") << ranked[i][t].first << ':'
                << fmt(ranked[i][t].second);
    }
    std::cout << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string data;
  std::string eval;
  std::vector<std::size_t> ks{1, 5, 10};
  std::string estimator = "unbiased";
  bool ap_literal_k = false;
  bool natural_log = false;
  int threads = 0;
  bool one_based = false;
};

int run_evaluate(const EvaluateArgs& a) {
  const Estimator est = estimator_flag(a.estimator);
  for (const auto k : a.ks) {
    if (k == 0) throw UsageError("--k values must be >= 1");
  }
  const MachModel model = io::load_model(a.model);
  const auto& cfg = model.config();
  const auto data = load_for(cfg, a.data, a.one_based);

  std::vector<metrics::EvalQuery> queries;
  if (!a.eval.empty()) {
    queries = io::load_eval_file(a.eval, a.one_based);
    if (queries.size() != data.samples.size()) {
      throw ValidationError("eval file has " + std::to_string(queries.size()) +
                            " queries but the dataset has " +
                            std::to_string(data.samples.size()) + " samples");
    }
  } else {
    for (const auto& s : data.samples) {
      metrics::EvalQuery q;
      q.relevant = s.labels;
      if (s.labels.size() == 1) q.most_relevant = s.labels.front();
      queries.push_back(std::move(q));
    }
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    queries[i].query_id = i;
    const auto& q = queries[i];
    const auto beyond = [&](metrics::ItemId id) { return id >= cfg.num_classes; };
    if (std::any_of(q.relevant.begin(), q.relevant.end(), beyond) ||
        (q.candidates &&
         std::any_of(q.candidates->begin(), q.candidates->end(), beyond))) {
      throw RangeError(i + 1, "query id beyond the model's " +
                                  std::to_string(cfg.num_classes) + " classes");
    }
  }

  const std::size_t depth = std::min<std::size_t>(
      *std::max_element(a.ks.begin(), a.ks.end()), cfg.num_classes);
  const auto xs = model_inputs(data, cfg);
  const auto scores = score_batch(model, xs, est, a.threads);
  std::vector<std::vector<metrics::ItemId>> rankings(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto ranked = queries[i].candidates
                            ? rank_candidates(scores[i], *queries[i].candidates, depth)
                            : top_k(scores[i], depth);
    for (const auto& [c, s] : ranked) rankings[i].push_back(c);
  }

  metrics::MetricOptions options;
  options.ap_normalizer = a.ap_literal_k ? metrics::ApNormalizer::kK
                                         : metrics::ApNormalizer::kMinKRelevant;
  options.ndcg_log = a.natural_log ? metrics::LogBase::kNatural : metrics::LogBase::kTwo;
  std::cout << "queries=" << queries.size() << " estimator=" << to_string(est) << '\n';
  for (const auto& r : metrics::evaluate(rankings, queries, a.ks, options)) {
    std::cout << "metric=" << r.name << " weighted=" << fmt(r.weighted)
              << " unweighted=" << fmt(r.unweighted) << '\n';
  }
  return 0;
}

// --------------------------------------------------------------- sketch

struct SketchArgs {
  std::string input;
  std::uint64_t buckets = 256;
  std::uint64_t reps = 8;
  std::uint64_t seed = 0;
  std::size_t top = 10;
  std::vector<std::string> query;
};

ClassId token_id(const std::string& token, std::uint64_t seed) {
  const auto h = murmur3_32(token.data(), token.size(),
                            static_cast<std::uint32_t>(seed ^ (seed >> 32)));
  return h % kTokenDomain;
}

int run_sketch(const SketchArgs& a) {
  if (a.buckets < 2) throw UsageError("--buckets must be >= 2");
  if (a.reps < 1) throw UsageError("--reps must be >= 1");
  std::ifstream file;
  if (!a.input.empty() && a.input != "-") {
    file.open(a.input);
    if (!file) throw IoError("cannot open " + a.input);
  }
  std::istream& in = file.is_open() ? file : std::cin;

  CountMinSketch sketch(a.buckets, a.reps, a.seed, kTokenDomain);
  std::map<std::string, ClassId> seen;
  std::string token;
  while (in >> token) {
    const auto id = token_id(token, a.seed);
    sketch.update(id);
    if (seen.size() < 1'000'000) seen.emplace(token, id);
  }
  std::cout << "total=" << sketch.total() << " buckets=" << a.buckets
            << " reps=" << a.reps << " distinct_tracked=" << seen.size() << '\n';
  for (const auto& q : a.query) {
    std::cout << "token=" << q << " estimate=" << sketch.estimate(token_id(q, a.seed))
              << '\n';
  }
  std::vector<std::pair<std::uint64_t, std::string>> heavy;
  heavy.reserve(seen.size());
  for (const auto& [tok, id] : seen) heavy.emplace_back(sketch.estimate(id), tok);
  const std::size_t n = std::min(a.top, heavy.size());
  std::partial_sort(heavy.begin(), heavy.begin() + static_cast<std::ptrdiff_t>(n),
                    heavy.end(), [](const auto& x, const auto& y) {
                      return x.first != y.first ? x.first > y.first : x.second < y.second;
                    });
  for (std::size_t i = 0; i < n; ++i) {
    std::cout << "heavy rank=" << i + 1 << " token=" << heavy[i].second
              << " estimate=" << heavy[i].first << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MACH: extreme classification with hashed meta-classifiers"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Repetitions and cost for a class count");
  p->add_option("--classes", plan.classes, "Number of classes K")->required();
  p->add_option("--buckets", plan.buckets, "Bucket counts (default: sweep 2,4,8,...)");
  p->add_option("--delta", plan.delta, "Allowed failure probability")->capture_default_str();
  p->add_option("--dim", plan.dim, "Input dimension")->capture_default_str();
  p->add_option("--hidden", plan.hidden, "Hidden units (0 = linear)")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a model from a sparse dataset");
  t->add_option("--data", tr.data, "Training dataset")->required();
  t->add_option("--model", tr.model, "Output model file")->required();
  t->add_option("--log", tr.log, "Write the loss log here instead of stdout");
  t->add_option("--buckets", tr.buckets, "Buckets per repetition")->capture_default_str();
  t->add_option("--reps", tr.reps, "Repetitions (default: planned from --delta)");
  t->add_option("--delta", tr.delta, "Failure probability used to plan --reps")->capture_default_str();
  t->add_option("--mode", tr.mode, "multiclass or multilabel")->capture_default_str();
  t->add_option("--hidden", tr.hidden, "Hidden units (0 = linear)")->capture_default_str();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  t->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--threads", tr.threads, "Worker threads (0 = all available)");
  t->add_option("--feature-hash-dim", tr.feature_hash_dim,
                "Hash input features down to this dimension");
  t->add_flag("--one-based", tr.one_based, "Ids in the input start at 1");

  PredictArgs pr;
  auto* q = app.add_subcommand("predict", "Top-k classes per sample");
  q->add_option("--model", pr.model)->required();
  q->add_option("--data", pr.data)->required();
  q->add_option("--topk", pr.topk)->capture_default_str();
  q->add_option("--estimator", pr.estimator, "unbiased, min or median")->capture_default_str();
  q->add_option("--threads", pr.threads, "Worker threads (0 = all available)");
  q->add_flag("--one-based", pr.one_based);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Ranking metrics over a dataset");
  e->add_option("--model", ev.model)->required();
  e->add_option("--data", ev.data, "Inputs; labels are the relevant set without --eval")
      ->required();
  e->add_option("--eval", ev.eval, "Query file aligned line by line with --data");
  e->add_option("--k", ev.ks, "Cutoffs, comma separated")->delimiter(',')->capture_default_str();
  e->add_option("--estimator", ev.estimator)->capture_default_str();
  e->add_flag("--ap-literal-k", ev.ap_literal_k, "Normalise AP@k by k");
  e->add_flag("--ndcg-natural-log", ev.natural_log, "Natural-log nDCG discount");
  e->add_option("--threads", ev.threads);
  e->add_flag("--one-based", ev.one_based);

  SketchArgs sk;
  auto* s = app.add_subcommand("sketch", "Count-min sketch over a token stream");
  s->add_option("--input", sk.input, "Whitespace-separated tokens (default stdin)");
  s->add_option("--buckets", sk.buckets)->capture_default_str();
  s->add_option("--reps", sk.reps)->capture_default_str();
  s->add_option("--seed", sk.seed)->capture_default_str();
  s->add_option("--top", sk.top, "Heavy hitters to list")->capture_default_str();
  s->add_option("--query", sk.query, "Tokens to estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*p) return run_plan(plan);
    if (*t) return run_train(tr);
    if (*q) return run_predict(pr);
    if (*e) return run_evaluate(ev);
    return run_sketch(sk);
  } catch (const UsageError& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfig& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kExitData;
  } catch (const ValidationError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kExitData;
  } catch (const DomainError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kExitData;
  } catch (const IoError& err) {
    std::cerr << "i/o error: " << err.what() << '\n';
    return kExitIo;
  } catch (const FormatError& err) {
    std::cerr << "format error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  }
}
