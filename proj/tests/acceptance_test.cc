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


// Acceptance suite. Each criterion prints exactly one line
//   [PASS] criterion N <name>: <evidence>
// or [FAIL], and the process exits non-zero when any requested criterion
// fails. Usage: hal_acceptance [--criterion N]... [--workers W]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hal/classifier.h"
#include "hal/datasets.h"
#include "hal/domain.h"
#include "hal/experiment.h"
#include "hal/metrics.h"
#include "hal/results_io.h"
#include "hal/rng.h"
#include "hal/sampling.h"
#include "oracles.h"

namespace hal::acceptance {
namespace {

constexpr std::uint64_t kSeed = 1;

struct Verdict {
  bool pass = false;
  std::string evidence;
};

std::size_t g_workers = 1;

std::string Fixed(double v, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

ExperimentConfig DeskConfig(double skew, std::size_t max_labels,
                            std::vector<std::string> samplers) {
  ExperimentConfig config = ConfigForScale("desk");
  config.name = "acceptance";
  config.dataset.set_skew(skew);
  config.max_labels = max_labels;
  config.samplers = std::move(samplers);
  config.seed = kSeed;
  config.workers = g_workers;
  return config;
}

// Per-repetition metric for (algorithm, labeled_count).
std::vector<double> Series(const ExperimentResult& result,
                           const std::string& algorithm, std::size_t labels,
                           double RoundMetrics::*metric) {
  std::map<std::size_t, double> by_rep;
  for (const RunRecord& record : result.records) {
    if (record.algorithm == algorithm && record.metrics.labeled_count == labels) {
      by_rep[record.repetition] = record.metrics.*metric;
    }
  }
  std::vector<double> out;
  for (const auto& [rep, value] : by_rep) out.push_back(value);
  return out;
}

std::vector<double> Difference(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double Mean(const std::vector<double>& v) { return Summarize(v).mean; }

// ---------------------------------------------------------------------------
// 1. HAL-R(1.0) and HAL-G(1.0) versus a standalone margin sampler.

// Independent margin sampler: per-row predictions, certainty from a full
// sort of the probability vector, full sort of the pool.
std::string StandaloneMarginTrace(const Mlp& classifier, const Dataset& pool,
                                  const PoolState& state, std::size_t round,
                                  std::size_t m, std::vector<ExampleId>* chosen) {
  std::vector<double> certainty(pool.size(), 0.0);
  for (const ExampleId id : state.unlabeled()) {
    std::vector<double> p = classifier.PredictProba(pool.row(id)).probs;
    std::sort(p.begin(), p.end(), std::greater<>());
    certainty[id] = std::abs(p[0] - p[1]);
  }
  *chosen = oracle::MarginSample(certainty, state.unlabeled(), m);
  std::string trace;
  for (std::size_t i = 0; i < chosen->size(); ++i) {
    const ExampleId id = (*chosen)[i];
    trace += std::to_string(round) + "," + std::to_string(i) + "," +
             std::to_string(id) + ",exploit," + FormatNumber(certainty[id]) + "\n";
  }
  return trace;
}

Verdict MarginEquivalence() {
  constexpr std::size_t kRounds = 50;
  constexpr std::size_t kBatch = 100;
  const ExperimentConfig desk = DeskConfig(0.005, 0, {});
  RngStream data_rng = RngStream(kSeed, 0).Derive(StreamPurpose::kDataGen);
  const Dataset pool = GenerateSyntheticSplit(desk.dataset.synthetic, data_rng).pool;
  MlpConfig mlp = desk.classifier;
  mlp.input_dim = pool.dim();
  const RngStream classifier_rng = RngStream(kSeed, 0).Derive(StreamPurpose::kClassifier);

  // Margin sampling needs a classifier, so every loop starts from the same
  // uniformly random first batch.
  std::vector<ExampleId> warm(pool.size());
  for (ExampleId i = 0; i < pool.size(); ++i) warm[i] = i;
  RngStream warm_rng = RngStream(kSeed, 0).Derive(StreamPurpose::kShuffle);
  Shuffle(std::span<ExampleId>(warm), warm_rng);
  warm.resize(kBatch);

  struct Loop {
    std::string name;
    std::optional<HalConfig> hal;
    PoolState state;
    std::optional<ScoreTable> table;
    RngStream rng;
    std::string trace;
  };
  std::vector<Loop> loops;
  for (const char* name : {"HAL-R(1.0)", "HAL-G(1.0)", "margin-standalone"}) {
    Loop loop{name, std::nullopt, PoolState(pool.size()), std::nullopt,
              RngStream(kSeed, 0).Derive(StreamPurpose::kSampler).Derive(HashName(name)),
              ""};
    loop.state.RevealLabels(warm);
    if (loop.name != "margin-standalone") {
      HalConfig base;
      base.batch_size = kBatch;
      loop.hal = ParseSamplerName(name, base);
      loop.table = ScoreTable::ForConfig(*loop.hal, pool, loop.state.unlabeled(),
                                         loop.state.labeled(), loop.rng);
    }
    loops.push_back(std::move(loop));
  }
  for (std::size_t round = 1; round <= kRounds; ++round) {
    for (Loop& loop : loops) {
      const Mlp model = Train(pool, loop.state.labeled(), mlp,
                              classifier_rng.Derive(loop.state.round()));
      std::vector<ExampleId> chosen;
      if (loop.hal) {
        const SelectionTrace trace = SelectBatch(loop.state, &model, pool,
                                                 *loop.table, *loop.hal, loop.rng);
        std::ostringstream out;
        WriteTraceCsv(out, round, trace);
        loop.trace += out.str();
        chosen = trace.ids();
      } else {
        loop.trace += StandaloneMarginTrace(model, pool, loop.state, round,
                                            kBatch, &chosen);
      }
      loop.state.RevealLabels(chosen);
    }
  }
  const std::string& reference = loops[2].trace;
  const bool r_same = loops[0].trace == reference;
  const bool g_same = loops[1].trace == reference;
  Verdict v;
  v.pass = r_same && g_same && !reference.empty();
  v.evidence = std::to_string(kRounds) + " rounds x " + std::to_string(kBatch) +
               " picks, trace " + std::to_string(reference.size()) +
               " bytes; HAL-R(1.0) " + (r_same ? "identical" : "DIFFERS") +
               ", HAL-G(1.0) " + (g_same ? "identical" : "DIFFERS");
  return v;
}

// ---------------------------------------------------------------------------
// 2. Incremental Gaussian scores versus recomputation after every pick.

Verdict IncrementalScores() {
  constexpr std::size_t kRounds = 10;
  constexpr std::size_t kBatch = 100;
  SyntheticConfig synthetic = DeskConfig(0.005, 0, {}).dataset.synthetic;
  synthetic.pool_size = 3000;
  synthetic.validation_size = 0;
  RngStream data_rng(kSeed, 2);
  const Dataset pool = GenerateSyntheticSplit(synthetic, data_rng).pool;
  MlpConfig mlp;
  mlp.input_dim = pool.dim();
  HalConfig config;
  config.trade_off = 0.5;
  config.scheme = ExplorationScheme::kGaussian;
  config.batch_size = 1;
  PoolState state(pool.size());
  RngStream rng(kSeed, 3);
  ScoreTable table = ScoreTable::ForConfig(config, pool, state.unlabeled(),
                                           state.labeled(), rng);
  std::optional<Mlp> model;
  double worst = 0.0;
  std::size_t checks = 0;
  for (std::size_t round = 0; round < kRounds; ++round) {
    std::vector<double> certainty;
    if (model) certainty = ComputeCertainties(*model, pool, state.unlabeled());
    for (std::size_t pick = 0; pick < kBatch; ++pick) {
      const SelectionTrace trace = SelectBatch(state, certainty, table, config, rng);
      state.RevealLabels(trace.ids());
      for (const ExampleId x : table.ids()) {
        worst = std::max(worst, oracle::RelativeError(
                                    table.score(x),
                                    oracle::GaussianFromScratch(
                                        pool, x, state.labeled(), config.delta)));
        ++checks;
      }
    }
    model = Train(pool, state.labeled(), mlp, RngStream(kSeed, 4).Derive(round));
  }
  Verdict v;
  v.pass = worst <= 1e-9 && checks > 0;
  v.evidence = std::to_string(checks) + " entry checks over " +
               std::to_string(kRounds * kBatch) +
               " picks; max relative error " + FormatNumber(worst) +
               " (limit 1e-9)";
  return v;
}

// ---------------------------------------------------------------------------
// 3. PR metrics versus brute-force threshold enumeration.

Verdict MetricOracle() {
  constexpr std::size_t kScoreDrawsPerLabeling = 20;
  RngStream rng(kSeed, 5);
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<bool> labels(n);
      auto flags = std::make_unique<bool[]>(n);
      for (std::size_t i = 0; i < n; ++i) flags[i] = labels[i] = (mask >> i) & 1u;
      for (std::size_t draw = 0; draw < kScoreDrawsPerLabeling; ++draw) {
        std::vector<double> scores(n);
        // Alternate continuous scores with a coarse grid that forces ties.
        for (double& s : scores) {
          s = draw % 2 == 0 ? rng.Uniform01()
                            : static_cast<double>(rng.UniformInt(3)) / 2.0;
        }
        const PrCurve curve =
            ComputePrCurve(scores, std::span<const bool>(flags.get(), n));
        const oracle::BruteForcePr brute = oracle::EnumerateThresholds(scores, labels);
        bool same = AucPr(curve) == brute.average_precision;
        for (const double floor : {0.5, 0.8, 0.9, 1.0}) {
          same = same && RecallAtPrecision(curve, floor) ==
                             oracle::BruteForceRecallAtPrecision(brute, floor);
        }
        mismatches += same ? 0 : 1;
        ++cases;
      }
    }
  }
  Verdict v;
  v.pass = mismatches == 0 && cases >= 10000;
  v.evidence = std::to_string(cases) + " cases (every labeling of 1..8 examples), " +
               std::to_string(mismatches) + " mismatches";
  return v;
}

// ---------------------------------------------------------------------------
// 4. Analytic gradients versus central finite differences.

Verdict GradientCheck() {
  constexpr std::size_t kConfigs = 100;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::size_t rejected = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; checked < kConfigs; ++seed) {
    RngStream rng(kSeed, 1000 + seed);
    MlpConfig config;
    config.input_dim = 1 + rng.UniformInt(6);
    config.hidden_width = 1 + rng.UniformInt(8);
    config.num_hidden_layers = 1 + rng.UniformInt(3);
    config.num_classes = 2 + static_cast<int>(rng.UniformInt(3));
    Mlp net = Mlp::Initialize(config, rng);
    for (DenseLayer& layer : net.layers()) {
      for (double& b : layer.biases) b = 0.5 * rng.Normal();
    }
    const std::size_t rows = 1 + rng.UniformInt(8);
    std::vector<double> x(rows * config.input_dim);
    for (double& value : x) value = rng.Normal();
    std::vector<Label> y(rows);
    for (Label& label : y) {
      label = 1 + static_cast<Label>(
                      rng.UniformInt(static_cast<std::uint64_t>(config.num_classes)));
    }
    // Central differences straddling a ReLU kink are meaningless.
    if (oracle::MinHiddenPreactivation(net, x) < 1e-2) {
      ++rejected;
      continue;
    }
    const double error = oracle::MaxGradientRelativeError(net, x, y, 1e-5, 1e-8);
    worst = std::max(worst, error);
    failures += error <= 1e-3 ? 0 : 1;
    ++checked;
  }
  Verdict v;
  v.pass = failures == 0;
  v.evidence = std::to_string(checked) + " configurations (" +
               std::to_string(rejected) + " redrawn near a ReLU kink), " +
               std::to_string(failures) + " over 1e-3; max relative error " +
               FormatNumber(worst);
  return v;
}

// ---------------------------------------------------------------------------
// 5-7. Paired HAL-G(0.5) versus margin comparisons.

struct PairedGap {
  double hal = 0.0;
  double margin = 0.0;
  MeanStderr diff;
};

PairedGap Gap(const ExperimentResult& result, std::size_t labels) {
  const auto hal = Series(result, "HAL-G(0.5)", labels, &RoundMetrics::auc_pr);
  const auto margin = Series(result, "HAL-R(1.0)", labels, &RoundMetrics::auc_pr);
  return {Mean(hal), Mean(margin), Summarize(Difference(hal, margin))};
}

std::string Describe(const PairedGap& g) {
  return "HAL-G(0.5) " + Fixed(g.hal) + " vs margin " + Fixed(g.margin) +
         ", paired diff " + Fixed(g.diff.mean) + " +/- " + Fixed(g.diff.std_error);
}

Verdict EarlyAdvantage() {
  const ExperimentResult result =
      RunExperiment(DeskConfig(0.005, 2000, {"HAL-G(0.5)", "margin"}));
  const PairedGap g = Gap(result, 2000);
  const double relative = g.margin > 0.0 ? g.hal / g.margin - 1.0 : INFINITY;
  const double z = g.diff.std_error > 0 ? g.diff.mean / g.diff.std_error : 0.0;
  Verdict v;
  v.pass = relative >= 0.20 && g.diff.mean > 2.0 * g.diff.std_error;
  v.evidence = "at 2000 labels, R=20: " + Describe(g) + " (" +
               Fixed(100.0 * relative, 1) + "% relative, need >= 20%; " +
               Fixed(z, 2) + " SE, need > 2)";
  return v;
}

Verdict BalancedNull() {
  const ExperimentResult result =
      RunExperiment(DeskConfig(0.5, 6000, {"HAL-G(0.5)", "margin"}));
  Verdict v;
  v.pass = true;
  for (const std::size_t labels : {std::size_t{2000}, std::size_t{6000}}) {
    const PairedGap g = Gap(result, labels);
    const bool within = std::abs(g.diff.mean) <= 2.0 * g.diff.std_error;
    v.pass = v.pass && within;
    v.evidence += (v.evidence.empty() ? "" : "; ") + std::string("at ") +
                  std::to_string(labels) + " labels: " + Describe(g) +
                  (within ? " (within 2 SE)" : " (OUTSIDE 2 SE)");
  }
  return v;
}

Verdict SkewTrend() {
  const std::vector<double> skews = {0.005, 0.05, 0.5};
  const SkewSweepResult sweep =
      SkewSweep(DeskConfig(0.005, 2000, {"HAL-G(0.5)", "margin"}), skews);
  std::vector<double> gaps;
  Verdict v;
  for (std::size_t i = 0; i < skews.size(); ++i) {
    const PairedGap g = Gap(sweep.results[i], 2000);
    gaps.push_back(g.diff.mean);
    v.evidence += (i == 0 ? "" : "; ") + std::string("skew ") +
                  FormatNumber(skews[i]) + " gap " + Fixed(g.diff.mean) +
                  " +/- " + Fixed(g.diff.std_error);
  }
  v.pass = gaps[0] >= gaps[1] && gaps[1] >= gaps[2];
  v.evidence += v.pass ? " (non-increasing)" : " (NOT non-increasing)";
  return v;
}

// ---------------------------------------------------------------------------
// 8. Interior trade-off values beat both pure strategies on recall@0.9.

Verdict InteriorP() {
  std::vector<std::string> samplers;
  for (const char* p : {"0.0", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "1.0"}) {
    samplers.push_back(std::string("HAL-R(") + p + ")");
  }
  const ExperimentResult result =
      RunExperiment(DeskConfig(0.005, 6000, samplers));
  auto series = [&](const std::string& name) {
    return Series(result, name, 6000, &RoundMetrics::recall_at_p90);
  };
  const auto pure_explore = series("HAL-R(0.0)");
  const auto pure_exploit = series("HAL-R(1.0)");
  std::string best;
  double best_mean = -1.0;
  for (std::size_t i = 1; i + 1 < samplers.size(); ++i) {
    const double mean = Mean(series(samplers[i]));
    if (mean > best_mean) {
      best_mean = mean;
      best = samplers[i];
    }
  }
  const auto interior = series(best);
  const MeanStderr vs_explore = Summarize(Difference(interior, pure_explore));
  const MeanStderr vs_exploit = Summarize(Difference(interior, pure_exploit));
  Verdict v;
  v.pass = vs_explore.mean > 2.0 * vs_explore.std_error &&
           vs_exploit.mean > 2.0 * vs_exploit.std_error;
  v.evidence = "recall@0.9 at 6000 labels, R=20: best interior " + best + " " +
               Fixed(best_mean) + "; p=0 " + Fixed(Mean(pure_explore)) +
               " (diff " + Fixed(vs_explore.mean) + " +/- " +
               Fixed(vs_explore.std_error) + "); p=1 " + Fixed(Mean(pure_exploit)) +
               " (diff " + Fixed(vs_exploit.mean) + " +/- " +
               Fixed(vs_exploit.std_error) + ")";
  return v;
}

// ---------------------------------------------------------------------------
// 9. Repeated `halsim run` invocations produce byte-identical CSVs.

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict Determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "hal-acceptance-determinism";
  fs::remove_all(root);
  const std::string common =
      " run --scale desk --seed 7 --set experiment.repetitions=3"
      " --set experiment.max_labels=1000"
      " --set 'experiment.samplers=HAL-G(0.5),HAL-R(0.5),margin,random'";
  std::vector<fs::path> outs;
  int failures = 0;
  for (const char* workers : {"1", "1", "3"}) {
    const fs::path out = root / ("run" + std::to_string(outs.size()));
    const std::string command = std::string(HALSIM_PATH) + common + " --workers " +
                                workers + " --out " + out.string() + " >/dev/null";
    failures += std::system(command.c_str()) == 0 ? 0 : 1;
    outs.push_back(out);
  }
  bool same = failures == 0;
  std::size_t bytes = 0;
  for (const char* file : {"results.csv", "aggregate.csv"}) {
    const std::string reference = Slurp(outs[0] / file);
    bytes += reference.size();
    same = same && !reference.empty();
    for (std::size_t i = 1; i < outs.size(); ++i) {
      same = same && Slurp(outs[i] / file) == reference;
    }
  }
  fs::remove_all(root);
  Verdict v;
  v.pass = same;
  v.evidence = "3 invocations (workers 1, 1, 3), " + std::to_string(bytes) +
               " CSV bytes each, " + (same ? "byte-identical" : "DIFFERENT") +
               (failures ? ", some invocations failed" : "");
  return v;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> criteria = {
      {1, "margin-equivalence", MarginEquivalence},
      {2, "incremental-scores", IncrementalScores},
      {3, "metric-oracle", MetricOracle},
      {4, "gradient-check", GradientCheck},
      {5, "early-advantage", EarlyAdvantage},
      {6, "balanced-null", BalancedNull},
      {7, "skew-trend", SkewTrend},
      {8, "interior-p", InteriorP},
      {9, "determinism", Determinism},
  };
  return criteria;
}

}  // namespace
}  // namespace hal::acceptance

int main(int argc, char** argv) {
  using hal::acceptance::Criteria;
  std::vector<int> selected;
  hal::acceptance::g_workers =
      std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--workers" && i + 1 < argc) {
      hal::acceptance::g_workers = std::max(1, std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: hal_acceptance [--criterion N]... [--workers W]\n";
      return 2;
    }
  }
  int failed = 0;
  for (const auto& criterion : Criteria()) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.number) ==
            selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    hal::acceptance::Verdict verdict;
    try {
      verdict = criterion.run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    std::cout << (verdict.pass ? "[PASS]" : "[FAIL]") << " criterion "
              << criterion.number << ' ' << criterion.name << ": "
              << verdict.evidence << " ["
              << hal::acceptance::Fixed(seconds, 1) << "s]" << std::endl;
    failed += verdict.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
