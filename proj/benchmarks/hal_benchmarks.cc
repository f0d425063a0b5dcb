/*
 * Copyright 2026 The HAL Simulator Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


// Microbenchmarks for the per-round hot paths: bottom-k selection, the
// incremental Gaussian score update, classifier training and batch
// prediction.

#include <numeric>
#include <vector>

#include "benchmark/benchmark.h"
#include "hal/classifier.h"
#include "hal/datasets.h"
#include "hal/domain.h"
#include "hal/rng.h"
#include "hal/sampling.h"

namespace hal {
namespace {

Dataset Pool(std::size_t n) {
  SyntheticConfig config;
  config.pool_size = n;
  config.validation_size = 0;
  RngStream rng(1, 1);
  return GenerateSyntheticSplit(config, rng).pool;
}

std::vector<ExampleId> Iota(std::size_t n) {
  std::vector<ExampleId> ids(n);
  std::iota(ids.begin(), ids.end(), ExampleId{0});
  return ids;
}

void BM_BottomK(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RngStream rng(2, 0);
  std::vector<ScoredId> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    table[i] = {static_cast<ExampleId>(i), rng.Uniform01()};
  }
  for (auto _ : state) benchmark::DoNotOptimize(BottomK(table, 100));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BottomK)->Arg(20000)->Arg(100000);

void BM_GaussianRemove(benchmark::State& state) {
  const Dataset pool = Pool(static_cast<std::size_t>(state.range(0)));
  const std::vector<ExampleId> ids = Iota(pool.size());
  RngStream rng(3, 0);
  ScoreTable table = ScoreTable::Gaussian(pool, ids, {}, 10.0);
  for (auto _ : state) {
    if (table.size() < 2) {
      state.PauseTiming();
      table = ScoreTable::Gaussian(pool, ids, {}, 10.0);
      state.ResumeTiming();
    }
    table.Remove(table.ArgMin().id, rng);
  }
}
BENCHMARK(BM_GaussianRemove)->Arg(20000)->Arg(100000);

void BM_Train(benchmark::State& state) {
  const Dataset pool = Pool(20000);
  const std::vector<ExampleId> ids = Iota(static_cast<std::size_t>(state.range(0)));
  MlpConfig config;
  config.input_dim = pool.dim();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(pool, ids, config, RngStream(4, 0)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          static_cast<std::int64_t>(config.epochs));
}
BENCHMARK(BM_Train)->Arg(1000)->Arg(6000)->Unit(benchmark::kMillisecond);

void BM_PredictProbaBatch(benchmark::State& state) {
  const Dataset pool = Pool(static_cast<std::size_t>(state.range(0)));
  MlpConfig config;
  config.input_dim = pool.dim();
  RngStream rng(5, 0);
  const Mlp net = Mlp::Initialize(config, rng);
  std::vector<double> probs(pool.size() * 2);
  for (auto _ : state) {
    net.PredictProbaBatch(pool.features(), probs);
    benchmark::DoNotOptimize(probs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictProbaBatch)->Arg(4000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hal

BENCHMARK_MAIN();
