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

#ifndef HAL_EXPERIMENT_H_
#define HAL_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hal/classifier.h"
#include "hal/datasets.h"
#include "hal/domain.h"
#include "hal/sampling.h"

namespace hal {

enum class DatasetKind { kSynthetic, kMnist, kSnapshot };

std::string DatasetKindName(DatasetKind kind);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kSynthetic;
  // Pool/validation sizes and skew live here for every kind. For MNIST the
  // sizes cap the number of images taken from each file before
  // binarization; for snapshots only validation_size is used.
  SyntheticConfig synthetic;
  MnistConfig mnist;
  std::string mnist_train_images;
  std::string mnist_train_labels;
  std::string mnist_test_images;
  std::string mnist_test_labels;
  std::string snapshot_path;
  // Draw a fresh dataset realization for every repetition.
  bool redraw_per_repetition = true;

  double skew() const;
  void set_skew(double skew);
};

struct ExperimentConfig {
  std::string name = "experiment";
  DatasetSpec dataset;
  // input_dim is taken from the data at run time.
  MlpConfig classifier;
  std::vector<std::string> samplers = {"HAL-G(0.5)", "margin"};
  double delta = 10.0;
  std::size_t neighborhood_size = 10;
  std::size_t batch_size = 100;
  // When non-zero, overrides max_labels / batch_size.
  std::size_t max_rounds = 0;
  std::size_t max_labels = 6000;
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  std::size_t Rounds() const;
  // Materialized sampler configs, in `samplers` order.
  std::vector<HalConfig> SamplerConfigs() const;
  // Throws InvalidArgument naming the bad field.
  void Validate() const;
};

// Defaults for "desk" (20k pool, 4k validation, R = 20, 6000 labels) or
// "paper" (100k pool, 10k validation, R = 100, 14000 labels) scale.
ExperimentConfig ConfigForScale(const std::string& scale);

// Metrics of one round: C_t evaluated on the validation set, |L_t| = m t.
struct RoundMetrics {
  std::size_t round = 0;
  std::size_t labeled_count = 0;
  double auc_pr = 0.0;
  double recall_at_p90 = 0.0;
  double recall_at_p80 = 0.0;
};

struct RunRecord {
  std::string experiment;
  std::string algorithm;
  double p = 0.0;
  ExplorationScheme scheme = ExplorationScheme::kRandom;
  double skew = 0.0;
  std::size_t repetition = 0;
  RoundMetrics metrics;
};

// Scores the positive-class probability of `classifier` on `validation`.
// Throws UndefinedMetric if the validation set has no positives.
RoundMetrics Evaluate(const Mlp& classifier, const Dataset& validation);

using TraceCallback =
    std::function<void(std::size_t round, const SelectionTrace& trace)>;

// One active-learning run from zero labels. Each round selects a batch,
// reveals its labels, retrains from scratch and evaluates. Stops early,
// without error, when fewer than m unlabeled points remain. `on_trace`
// sees every batch before its labels are revealed.
std::vector<RoundMetrics> RunSingle(const Dataset& pool,
                                    const Dataset& validation,
                                    const HalConfig& sampler,
                                    const MlpConfig& classifier,
                                    std::size_t rounds,
                                    const RngStream& sampler_rng,
                                    const RngStream& classifier_rng,
                                    const TraceCallback& on_trace = {});

struct MeanStderr {
  double mean = 0.0;
  // Sample standard deviation / sqrt(count); 0 when count == 1.
  double std_error = 0.0;
};

MeanStderr Summarize(std::span<const double> values);

struct AggregateRow {
  std::string experiment;
  std::string algorithm;
  double p = 0.0;
  ExplorationScheme scheme = ExplorationScheme::kRandom;
  double skew = 0.0;
  std::size_t round = 0;
  std::size_t labeled_count = 0;
  std::size_t repetitions = 0;
  MeanStderr auc_pr;
  MeanStderr recall_at_p90;
  MeanStderr recall_at_p80;
};

// Groups by (experiment, algorithm, skew, round) in first-seen order.
std::vector<AggregateRow> Aggregate(std::span<const RunRecord> records);

struct ExperimentResult {
  std::string experiment;
  double skew = 0.0;
  // Ordered by sampler (config order), then repetition, then round.
  std::vector<RunRecord> records;
  std::vector<AggregateRow> aggregate;
  // fingerprints[r][s]: hash of the pool sampler s saw in repetition r.
  std::vector<std::vector<std::uint64_t>> pool_fingerprints;
};

// A run failed; the message identifies the repetition and sampler.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs every sampler for every repetition. Samplers within a repetition see
// the same pool, validation set and classifier streams; only the sampler
// stream differs. Repetitions run on config.workers threads; results do not
// depend on scheduling.
ExperimentResult RunExperiment(const ExperimentConfig& config);

struct SkewSweepResult {
  std::vector<double> skews;
  std::vector<ExperimentResult> results;
};

// RunExperiment once per skew value.
SkewSweepResult SkewSweep(const ExperimentConfig& base,
                          std::span<const double> skews);

}  // namespace hal

#endif  // HAL_EXPERIMENT_H_
