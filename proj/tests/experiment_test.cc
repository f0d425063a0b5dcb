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
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "hal/results_io.h"

namespace hal {
namespace {

ExperimentConfig TinyConfig() {
  ExperimentConfig config;
  config.name = "tiny";
  config.dataset.synthetic.pool_size = 600;
  config.dataset.synthetic.validation_size = 300;
  config.dataset.synthetic.target_skew = 0.05;
  config.classifier.hidden_width = 8;
  config.classifier.epochs = 2;
  config.batch_size = 50;
  config.max_labels = 200;
  config.repetitions = 3;
  config.seed = 5;
  return config;
}

SyntheticData TinyData(std::uint64_t seed) {
  RngStream rng(seed, 1);
  return GenerateSyntheticSplit(TinyConfig().dataset.synthetic, rng);
}

HalConfig Sampler(const std::string& name, std::size_t m) {
  HalConfig base;
  base.batch_size = m;
  return ParseSamplerName(name, base);
}

bool SameMetrics(const RoundMetrics& a, const RoundMetrics& b) {
  return a.round == b.round && a.labeled_count == b.labeled_count &&
         a.auc_pr == b.auc_pr && a.recall_at_p90 == b.recall_at_p90 &&
         a.recall_at_p80 == b.recall_at_p80;
}

bool SameRecords(const std::vector<RunRecord>& a, const std::vector<RunRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].algorithm != b[i].algorithm || a[i].repetition != b[i].repetition ||
        !SameMetrics(a[i].metrics, b[i].metrics)) {
      return false;
    }
  }
  return true;
}

std::string ResultsCsv(const ExperimentResult& result) {
  std::ostringstream out;
  WriteResultsCsv(out, result.records);
  return out.str();
}

std::string AggregateCsv(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  WriteAggregateCsv(out, rows);
  return out.str();
}

TEST(RunSingle, ZeroRoundsProducesNothing) {
  const SyntheticData data = TinyData(1);
  const auto records = RunSingle(data.pool, data.validation,
                                 Sampler("HAL-G(0.5)", 50), MlpConfig{}, 0,
                                 RngStream(1, 2), RngStream(1, 3));
  EXPECT_TRUE(records.empty());
}

TEST(RunSingle, LabelBudgetGrowsByOneBatchPerRound) {
  const SyntheticData data = TinyData(2);
  std::set<ExampleId> queried;
  std::size_t queries = 0;
  const auto records = RunSingle(
      data.pool, data.validation, Sampler("HAL-G(0.5)", 50),
      TinyConfig().classifier, 4, RngStream(2, 2), RngStream(2, 3),
      [&](std::size_t, const SelectionTrace& trace) {
        for (const ExampleId id : trace.ids()) queried.insert(id);
        queries += trace.picks.size();
      });
  ASSERT_EQ(records.size(), 4u);
  for (std::size_t t = 0; t < records.size(); ++t) {
    EXPECT_EQ(records[t].round, t + 1);
    EXPECT_EQ(records[t].labeled_count, 50 * (t + 1));
    EXPECT_GE(records[t].auc_pr, 0.0);
    EXPECT_LE(records[t].auc_pr, 1.0);
  }
  EXPECT_EQ(queries, 200u);
  EXPECT_EQ(queried.size(), 200u);
}

TEST(RunSingle, PoolExhaustionEndsAtLastFullBatch) {
  const SyntheticData data = TinyData(3);
  const auto records = RunSingle(data.pool, data.validation,
                                 Sampler("HAL-R(0.5)", 250),
                                 TinyConfig().classifier, 10, RngStream(3, 2),
                                 RngStream(3, 3));
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records.back().labeled_count, 500u);
}

TEST(RunSingle, IsDeterministic) {
  const SyntheticData data = TinyData(4);
  auto run = [&] {
    return RunSingle(data.pool, data.validation, Sampler("HAL-G(0.3)", 50),
                     TinyConfig().classifier, 3, RngStream(4, 2), RngStream(4, 3));
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(SameMetrics(a[i], b[i]));
}

TEST(Summarize, ConstantValuesHaveZeroError) {
  const std::vector<double> values(7, 0.25);
  const MeanStderr s = Summarize(values);
  EXPECT_EQ(s.mean, 0.25);
  EXPECT_EQ(s.std_error, 0.0);
  const std::vector<double> two = {1.0, 3.0};
  EXPECT_EQ(Summarize(two).mean, 2.0);
  EXPECT_DOUBLE_EQ(Summarize(two).std_error, 1.0);
}

TEST(RunExperiment, RecordsAreOrderedAndComplete) {
  const ExperimentConfig config = TinyConfig();
  const ExperimentResult result = RunExperiment(config);
  ASSERT_EQ(result.records.size(), 2u * 3u * 4u);
  EXPECT_EQ(result.records.front().algorithm, "HAL-G(0.5)");
  EXPECT_EQ(result.records.back().algorithm, "HAL-R(1.0)");
  EXPECT_EQ(result.records.back().repetition, 2u);
  EXPECT_EQ(result.records.back().metrics.labeled_count, 200u);
  EXPECT_EQ(result.aggregate.size(), 2u * 4u);
  for (const AggregateRow& row : result.aggregate) EXPECT_EQ(row.repetitions, 3u);
}

TEST(RunExperiment, IsDeterministicAndIndependentOfWorkers) {
  ExperimentConfig config = TinyConfig();
  const ExperimentResult a = RunExperiment(config);
  const ExperimentResult b = RunExperiment(config);
  config.workers = 3;
  const ExperimentResult c = RunExperiment(config);
  EXPECT_TRUE(SameRecords(a.records, b.records));
  EXPECT_TRUE(SameRecords(a.records, c.records));
  EXPECT_EQ(ResultsCsv(a), ResultsCsv(c));
}

TEST(RunExperiment, SingleRepetitionAggregateEqualsTheRun) {
  ExperimentConfig config = TinyConfig();
  config.repetitions = 1;
  const ExperimentResult result = RunExperiment(config);
  ASSERT_EQ(result.aggregate.size(), result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    EXPECT_EQ(result.aggregate[i].auc_pr.mean, result.records[i].metrics.auc_pr);
    EXPECT_EQ(result.aggregate[i].auc_pr.std_error, 0.0);
    EXPECT_EQ(result.aggregate[i].recall_at_p90.mean,
              result.records[i].metrics.recall_at_p90);
  }
}

TEST(RunExperiment, SamplersArePairedWithinRepetitions) {
  ExperimentConfig config = TinyConfig();
  config.samplers = {"HAL-G(0.5)", "margin", "random"};
  config.max_labels = 50;
  const ExperimentResult result = RunExperiment(config);
  ASSERT_EQ(result.pool_fingerprints.size(), 3u);
  std::set<std::uint64_t> per_rep;
  for (const auto& rep : result.pool_fingerprints) {
    ASSERT_EQ(rep.size(), 3u);
    EXPECT_EQ(rep[0], rep[1]);
    EXPECT_EQ(rep[0], rep[2]);
    per_rep.insert(rep[0]);
  }
  EXPECT_EQ(per_rep.size(), 3u);

  config.dataset.redraw_per_repetition = false;
  const ExperimentResult fixed = RunExperiment(config);
  for (const auto& rep : fixed.pool_fingerprints) {
    EXPECT_EQ(rep[0], fixed.pool_fingerprints[0][0]);
  }
}

TEST(RunExperiment, AggregateIsRecomputableFromCsv) {
  const ExperimentResult result = RunExperiment(TinyConfig());
  std::istringstream csv(ResultsCsv(result));
  const std::vector<RunRecord> back = ReadResultsCsv(csv);
  ASSERT_EQ(back.size(), result.records.size());
  EXPECT_EQ(AggregateCsv(Aggregate(back)), AggregateCsv(result.aggregate));
}

TEST(RunExperiment, RunErrorsNameTheRun) {
  ExperimentConfig config = TinyConfig();
  config.samplers = {"HAL-N(0.5)"};
  config.neighborhood_size = 5000;
  try {
    RunExperiment(config);
    FAIL() << "expected RunError";
  } catch (const RunError& e) {
    EXPECT_NE(std::string(e.what()).find("tiny/HAL-N(0.5)/rep0"),
              std::string::npos)
        << e.what();
  }
}

TEST(RunExperiment, RejectsInvalidConfig) {
  ExperimentConfig config = TinyConfig();
  config.repetitions = 0;
  EXPECT_THROW(RunExperiment(config), InvalidArgument);
  config = TinyConfig();
  config.samplers = {"margin", "HAL-R(1.0)"};
  EXPECT_THROW(RunExperiment(config), InvalidArgument);
}

TEST(SkewSweep, SingleValueMatchesRunExperiment) {
  ExperimentConfig config = TinyConfig();
  config.repetitions = 2;
  const std::vector<double> skews = {0.05};
  const SkewSweepResult sweep = SkewSweep(config, skews);
  ASSERT_EQ(sweep.results.size(), 1u);
  EXPECT_EQ(ResultsCsv(sweep.results[0]), ResultsCsv(RunExperiment(config)));
}

TEST(SkewSweep, RecordsCarryTheirSkew) {
  ExperimentConfig config = TinyConfig();
  config.repetitions = 1;
  config.max_labels = 50;
  const std::vector<double> skews = {0.05, 0.2};
  const SkewSweepResult sweep = SkewSweep(config, skews);
  ASSERT_EQ(sweep.results.size(), 2u);
  for (std::size_t i = 0; i < skews.size(); ++i) {
    for (const RunRecord& record : sweep.results[i].records) {
      EXPECT_EQ(record.skew, skews[i]);
    }
  }
}

TEST(ConfigForScale, DeskAndPaperDefaults) {
  const ExperimentConfig desk = ConfigForScale("desk");
  EXPECT_EQ(desk.dataset.synthetic.pool_size, 20000u);
  EXPECT_EQ(desk.dataset.synthetic.validation_size, 4000u);
  EXPECT_EQ(desk.repetitions, 20u);
  EXPECT_EQ(desk.Rounds(), 60u);
  const ExperimentConfig paper = ConfigForScale("paper");
  EXPECT_EQ(paper.dataset.synthetic.pool_size, 100000u);
  EXPECT_EQ(paper.repetitions, 100u);
  EXPECT_EQ(paper.Rounds(), 140u);
  EXPECT_THROW(ConfigForScale("huge"), InvalidArgument);
}

}  // namespace
}  // namespace hal
