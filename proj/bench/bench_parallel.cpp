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

// Serial reference against the OpenMP kernels: repetition-parallel training
// and query-parallel batch scoring. Thread count is the benchmark argument.

#include <benchmark/benchmark.h>

#include "mach/decoder.hpp"
#include "mach/synthetic.hpp"
#include "mach/train.hpp"

namespace {

using namespace mach;

struct Fixture {
  synthetic::Split split;
  MachConfig config;
  std::vector<SparseVector> queries;

  Fixture() {
    synthetic::ClusterTask task;
    task.num_classes = 200;
    task.dim = 64;
    split = synthetic::gaussian_clusters(task, 20, 10);
    config.num_classes = 200;
    config.buckets = 32;
    config.repetitions = 16;
    config.input_dim = 64;
    config.epochs = 2;
    for (const auto& s : split.test) queries.push_back(s.features);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_TrainSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::train_serial(f.split.train, f.config));
  }
}

void BM_TrainParallel(benchmark::State& state) {
  const auto& f = fixture();
  TrainOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(f.split.train, f.config, opts));
  }
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto& f = fixture();
  static const MachModel model = train(f.split.train, f.config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::score_batch_serial(model, f.queries, Estimator::kUnbiased));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.queries.size()));
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto& f = fixture();
  static const MachModel model = train(f.split.train, f.config);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_batch(model, f.queries, Estimator::kUnbiased, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.queries.size()));
}

}  // namespace

BENCHMARK(BM_TrainSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
