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

#include "hal/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>
#include <tuple>

#include "hal/metrics.h"

namespace hal {
namespace {

struct RepetitionData {
  Dataset pool;
  Dataset validation;
};

// Read-only inputs shared by all repetitions.
struct SharedSources {
  std::optional<DigitImages> mnist_train;
  std::optional<DigitImages> mnist_test;
  std::optional<Dataset> snapshot;
};

SharedSources LoadSources(const DatasetSpec& spec) {
  SharedSources sources;
  if (spec.kind == DatasetKind::kMnist) {
    sources.mnist_train =
        LoadMnist(spec.mnist_train_images, spec.mnist_train_labels);
    sources.mnist_test = LoadMnist(spec.mnist_test_images, spec.mnist_test_labels);
  } else if (spec.kind == DatasetKind::kSnapshot) {
    sources.snapshot = ReadSnapshotFile(spec.snapshot_path);
  }
  return sources;
}

// First `cap` images of a uniformly random order (all when cap >= size).
DigitImages CapImages(const DigitImages& raw, std::size_t cap, RngStream& rng) {
  if (cap >= raw.size()) return raw;
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < cap; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.UniformInt(raw.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(cap);
  std::sort(order.begin(), order.end());
  DigitImages out;
  out.rows = raw.rows;
  out.cols = raw.cols;
  const std::size_t d = raw.dim();
  for (const std::size_t i : order) {
    out.pixels.insert(out.pixels.end(), raw.pixels.begin() + i * d,
                      raw.pixels.begin() + (i + 1) * d);
    out.digits.push_back(raw.digits[i]);
  }
  return out;
}

RepetitionData PrepareData(const DatasetSpec& spec, const SharedSources& sources,
                           RngStream data_rng, RngStream split_rng) {
  switch (spec.kind) {
    case DatasetKind::kSynthetic: {
      SyntheticData data = GenerateSyntheticSplit(spec.synthetic, data_rng);
      return {std::move(data.pool), std::move(data.validation)};
    }
    case DatasetKind::kMnist: {
      const DigitImages train =
          CapImages(*sources.mnist_train, spec.synthetic.pool_size, split_rng);
      const DigitImages test =
          CapImages(*sources.mnist_test, spec.synthetic.validation_size, split_rng);
      Dataset pool = BinarizeAndDownsample(train, spec.mnist, data_rng);
      Dataset validation = spec.mnist.match_validation_skew
                               ? BinarizeAndDownsample(test, spec.mnist, data_rng)
                               : Binarize(test, spec.mnist);
      return {std::move(pool), std::move(validation)};
    }
    case DatasetKind::kSnapshot: {
      PoolValidationSplit split = SplitPoolValidation(
          *sources.snapshot, spec.synthetic.validation_size, split_rng);
      return {std::move(split.pool), std::move(split.validation)};
    }
  }
  throw InvalidArgument("unknown dataset kind");
}

double RecordedSkew(const DatasetSpec& spec, const SharedSources& sources) {
  if (spec.kind == DatasetKind::kSnapshot) return sources.snapshot->skew();
  return spec.skew();
}

}  // namespace

std::string DatasetKindName(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kSynthetic:
      return "synthetic";
    case DatasetKind::kMnist:
      return "mnist";
    case DatasetKind::kSnapshot:
      return "snapshot";
  }
  return "unknown";
}

double DatasetSpec::skew() const {
  return kind == DatasetKind::kMnist ? mnist.target_skew : synthetic.target_skew;
}

void DatasetSpec::set_skew(double skew) {
  synthetic.target_skew = skew;
  mnist.target_skew = skew;
}

std::size_t ExperimentConfig::Rounds() const {
  if (max_rounds > 0) return max_rounds;
  return batch_size == 0 ? 0 : max_labels / batch_size;
}

std::vector<HalConfig> ExperimentConfig::SamplerConfigs() const {
  HalConfig base;
  base.batch_size = batch_size;
  base.delta = delta;
  base.neighborhood_size = neighborhood_size;
  std::vector<HalConfig> out;
  for (const std::string& name : samplers) {
    out.push_back(ParseSamplerName(name, base));
  }
  return out;
}

void ExperimentConfig::Validate() const {
  if (repetitions < 1) throw InvalidArgument("experiment.repetitions must be >= 1");
  if (batch_size < 1) throw InvalidArgument("experiment.batch_size must be >= 1");
  if (workers < 1) throw InvalidArgument("experiment.workers must be >= 1");
  if (samplers.empty()) throw InvalidArgument("experiment.samplers is empty");
  std::vector<std::string> names;
  for (const HalConfig& sampler : SamplerConfigs()) {
    sampler.Validate();
    names.push_back(sampler.Name());
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw InvalidArgument("experiment.samplers lists the same sampler twice");
  }
  MlpConfig classifier_check = classifier;
  classifier_check.input_dim = std::max<std::size_t>(classifier.input_dim, 1);
  classifier_check.Validate();
  switch (dataset.kind) {
    case DatasetKind::kSynthetic:
      dataset.synthetic.Validate();
      break;
    case DatasetKind::kMnist:
      dataset.mnist.Validate();
      if (dataset.mnist_train_images.empty() || dataset.mnist_train_labels.empty() ||
          dataset.mnist_test_images.empty() || dataset.mnist_test_labels.empty()) {
        throw InvalidArgument("dataset.mnist_* paths are required for mnist");
      }
      break;
    case DatasetKind::kSnapshot:
      if (dataset.snapshot_path.empty()) {
        throw InvalidArgument("dataset.snapshot is required for snapshot");
      }
      break;
  }
}

ExperimentConfig ConfigForScale(const std::string& scale) {
  ExperimentConfig config;
  if (scale == "desk") {
    config.dataset.synthetic.pool_size = 20000;
    config.dataset.synthetic.validation_size = 4000;
    config.repetitions = 20;
    config.max_labels = 6000;
  } else if (scale == "paper") {
    config.dataset.synthetic.pool_size = 100000;
    config.dataset.synthetic.validation_size = 10000;
    config.repetitions = 100;
    config.max_labels = 14000;
  } else {
    throw InvalidArgument("unknown scale '" + scale + "' (desk|paper)");
  }
  return config;
}

RoundMetrics Evaluate(const Mlp& classifier, const Dataset& validation) {
  const std::size_t k = static_cast<std::size_t>(classifier.config().num_classes);
  std::vector<double> probs(validation.size() * k);
  classifier.PredictProbaBatch(validation.features(), probs);
  std::vector<double> scores(validation.size());
  std::unique_ptr<bool[]> positive(new bool[validation.size()]);
  for (ExampleId id = 0; id < validation.size(); ++id) {
    scores[id] = probs[id * k + static_cast<std::size_t>(kPositiveClass - 1)];
    positive[id] = validation.is_positive(id);
  }
  const PrCurve curve = ComputePrCurve(
      scores, std::span<const bool>(positive.get(), validation.size()));
  RoundMetrics metrics;
  metrics.auc_pr = AucPr(curve);
  metrics.recall_at_p90 = RecallAtPrecision(curve, 0.9);
  metrics.recall_at_p80 = RecallAtPrecision(curve, 0.8);
  return metrics;
}

std::vector<RoundMetrics> RunSingle(const Dataset& pool,
                                    const Dataset& validation,
                                    const HalConfig& sampler,
                                    const MlpConfig& classifier,
                                    std::size_t rounds,
                                    const RngStream& sampler_rng,
                                    const RngStream& classifier_rng,
                                    const TraceCallback& on_trace) {
  sampler.Validate();
  MlpConfig mlp_config = classifier;
  mlp_config.input_dim = pool.dim();
  mlp_config.num_classes = std::max(pool.num_classes(), 2);
  mlp_config.Validate();
  if (validation.dim() != pool.dim()) {
    throw InvalidArgument("RunSingle: pool and validation dimensions differ");
  }

  const std::size_t m = sampler.batch_size;
  rounds = std::min(rounds, pool.size() / m);
  std::vector<RoundMetrics> out;
  if (rounds == 0) return out;

  RngStream rng = sampler_rng;
  PoolState state(pool.size());
  ScoreTable scores =
      ScoreTable::ForConfig(sampler, pool, state.unlabeled(), state.labeled(), rng);
  std::optional<Mlp> model;
  for (std::size_t t = 0; t < rounds; ++t) {
    const SelectionTrace trace =
        SelectBatch(state, model ? &*model : nullptr, pool, scores, sampler, rng);
    if (on_trace) on_trace(t, trace);
    state.RevealLabels(trace.ids());
    model = Train(pool, state.labeled(), mlp_config,
                  classifier_rng.Derive(state.round()));
    RoundMetrics metrics = Evaluate(*model, validation);
    metrics.round = state.round();
    metrics.labeled_count = state.labeled().size();
    out.push_back(metrics);
  }
  return out;
}

MeanStderr Summarize(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<AggregateRow> Aggregate(std::span<const RunRecord> records) {
  using Key = std::tuple<std::string, std::string, double, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<AggregateRow> rows;
  std::vector<std::vector<const RunRecord*>> members;
  for (const RunRecord& record : records) {
    const Key key{record.experiment, record.algorithm, record.skew,
                  record.metrics.round};
    auto [it, inserted] = index.emplace(key, rows.size());
    if (inserted) {
      AggregateRow row;
      row.experiment = record.experiment;
      row.algorithm = record.algorithm;
      row.p = record.p;
      row.scheme = record.scheme;
      row.skew = record.skew;
      row.round = record.metrics.round;
      row.labeled_count = record.metrics.labeled_count;
      rows.push_back(row);
      members.emplace_back();
    }
    members[it->second].push_back(&record);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<double> auc, r90, r80;
    for (const RunRecord* record : members[i]) {
      auc.push_back(record->metrics.auc_pr);
      r90.push_back(record->metrics.recall_at_p90);
      r80.push_back(record->metrics.recall_at_p80);
    }
    rows[i].repetitions = members[i].size();
    rows[i].auc_pr = Summarize(auc);
    rows[i].recall_at_p90 = Summarize(r90);
    rows[i].recall_at_p80 = Summarize(r80);
  }
  return rows;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<HalConfig> samplers = config.SamplerConfigs();
  const SharedSources sources = LoadSources(config.dataset);
  const double skew = RecordedSkew(config.dataset, sources);
  const std::size_t reps = config.repetitions;
  const std::size_t rounds = config.Rounds();
  const RngStream root(config.seed, 0);

  // slots[r][s] holds the metrics of sampler s in repetition r.
  std::vector<std::vector<std::vector<RoundMetrics>>> slots(
      reps, std::vector<std::vector<RoundMetrics>>(samplers.size()));
  std::vector<std::vector<std::uint64_t>> fingerprints(
      reps, std::vector<std::uint64_t>(samplers.size(), 0));
  std::vector<std::exception_ptr> errors(reps);

  auto run_repetition = [&](std::size_t r) {
    const RngStream rep = root.Derive(r);
    const RngStream data_rng = config.dataset.redraw_per_repetition
                                   ? rep.Derive(StreamPurpose::kDataGen)
                                   : root.Derive(StreamPurpose::kDataGen);
    const RngStream split_rng = config.dataset.redraw_per_repetition
                                    ? rep.Derive(StreamPurpose::kSplit)
                                    : root.Derive(StreamPurpose::kSplit);
    RepetitionData data;
    try {
      data = PrepareData(config.dataset, sources, data_rng, split_rng);
    } catch (const std::exception& e) {
      throw RunError("run " + config.name + "/rep" + std::to_string(r) +
                     " dataset: " + e.what());
    }
    const std::uint64_t fingerprint = data.pool.Fingerprint();
    const RngStream classifier_rng = rep.Derive(StreamPurpose::kClassifier);
    for (std::size_t s = 0; s < samplers.size(); ++s) {
      const std::string name = samplers[s].Name();
      try {
        const RngStream sampler_rng =
            rep.Derive(StreamPurpose::kSampler).Derive(HashName(name));
        fingerprints[r][s] = fingerprint;
        slots[r][s] = RunSingle(data.pool, data.validation, samplers[s],
                                config.classifier, rounds, sampler_rng,
                                classifier_rng);
      } catch (const std::exception& e) {
        throw RunError("run " + config.name + "/" + name + "/rep" +
                       std::to_string(r) + ": " + e.what());
      }
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        run_repetition(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t thread_count = std::min(config.workers, reps);
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
  }
  for (const std::exception_ptr& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  ExperimentResult result;
  result.experiment = config.name;
  result.skew = skew;
  result.pool_fingerprints = std::move(fingerprints);
  for (std::size_t s = 0; s < samplers.size(); ++s) {
    for (std::size_t r = 0; r < reps; ++r) {
      for (const RoundMetrics& metrics : slots[r][s]) {
        RunRecord record;
        record.experiment = config.name;
        record.algorithm = samplers[s].Name();
        record.p = samplers[s].trade_off;
        record.scheme = samplers[s].scheme;
        record.skew = skew;
        record.repetition = r;
        record.metrics = metrics;
        result.records.push_back(std::move(record));
      }
    }
  }
  result.aggregate = Aggregate(result.records);
  return result;
}

SkewSweepResult SkewSweep(const ExperimentConfig& base,
                          std::span<const double> skews) {
  SkewSweepResult sweep;
  for (const double skew : skews) {
    ExperimentConfig config = base;
    config.dataset.set_skew(skew);
    sweep.skews.push_back(skew);
    sweep.results.push_back(RunExperiment(config));
  }
  return sweep;
}

}  // namespace hal
