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

#include "hal/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace hal {
namespace {

constexpr std::size_t kScoringChunk = 1024;

bool ScoredLess(const ScoredId& a, const ScoredId& b) {
  return std::tie(a.score, a.id) < std::tie(b.score, b.id);
}

}  // namespace

std::string SchemeName(ExplorationScheme scheme) {
  switch (scheme) {
    case ExplorationScheme::kRandom:
      return "random";
    case ExplorationScheme::kGaussian:
      return "gaussian";
    case ExplorationScheme::kNeighborhood:
      return "neighborhood";
  }
  return "unknown";
}

ExplorationScheme ParseScheme(const std::string& name) {
  if (name == "random") return ExplorationScheme::kRandom;
  if (name == "gaussian") return ExplorationScheme::kGaussian;
  if (name == "neighborhood") return ExplorationScheme::kNeighborhood;
  throw InvalidArgument("unknown exploration scheme '" + name + "'");
}

void HalConfig::Validate() const {
  if (!(trade_off >= 0.0 && trade_off <= 1.0)) {
    throw InvalidArgument("HalConfig: trade_off must be in [0, 1]");
  }
  if (batch_size < 1) throw InvalidArgument("HalConfig: batch_size must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("HalConfig: delta must be > 0");
  }
  if (neighborhood_size < 1) {
    throw InvalidArgument("HalConfig: neighborhood_size must be >= 1");
  }
}

std::string HalConfig::Name() const {
  char tag = 'G';
  if (scheme == ExplorationScheme::kRandom) tag = 'R';
  if (scheme == ExplorationScheme::kNeighborhood) tag = 'N';
  std::string p = FormatNumber(trade_off);
  if (p.find_first_of(".e") == std::string::npos) p += ".0";
  return std::string("HAL-") + tag + "(" + p + ")";
}

HalConfig ParseSamplerName(const std::string& name, const HalConfig& base) {
  HalConfig config = base;
  if (name == "margin") {
    config.scheme = ExplorationScheme::kRandom;
    config.trade_off = 1.0;
    return config;
  }
  if (name == "random") {
    config.scheme = ExplorationScheme::kRandom;
    config.trade_off = 0.0;
    return config;
  }
  const bool shaped = name.size() > 7 && name.compare(0, 4, "HAL-") == 0 &&
                      name[5] == '(' && name.back() == ')';
  if (!shaped) throw InvalidArgument("unknown sampler '" + name + "'");
  switch (name[4]) {
    case 'R':
      config.scheme = ExplorationScheme::kRandom;
      break;
    case 'G':
      config.scheme = ExplorationScheme::kGaussian;
      break;
    case 'N':
      config.scheme = ExplorationScheme::kNeighborhood;
      break;
    default:
      throw InvalidArgument("unknown sampler '" + name + "'");
  }
  const std::string p = name.substr(6, name.size() - 7);
  std::size_t used = 0;
  try {
    config.trade_off = std::stod(p, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != p.size() || p.empty()) {
    throw InvalidArgument("bad trade-off in sampler '" + name + "'");
  }
  config.Validate();
  return config;
}

double CertaintyScore(std::span<const double> probs) {
  if (probs.size() < 2) {
    throw InvalidArgument("CertaintyScore: need at least two classes");
  }
  double first = -std::numeric_limits<double>::infinity();
  double second = first;
  for (const double v : probs) {
    if (v > first) {
      second = first;
      first = v;
    } else if (v > second) {
      second = v;
    }
  }
  return std::abs(first - second);
}

std::vector<double> ComputeCertainties(const Mlp& classifier,
                                       const Dataset& data,
                                       std::span<const ExampleId> ids) {
  const std::size_t d = data.dim();
  const std::size_t k = static_cast<std::size_t>(classifier.config().num_classes);
  std::vector<double> certainty(data.size(),
                                std::numeric_limits<double>::infinity());
  std::vector<double> rows;
  std::vector<double> probs;
  for (std::size_t start = 0; start < ids.size(); start += kScoringChunk) {
    const std::size_t count = std::min(kScoringChunk, ids.size() - start);
    rows.resize(count * d);
    probs.resize(count * k);
    for (std::size_t r = 0; r < count; ++r) {
      const auto row = data.row(ids[start + r]);
      std::copy(row.begin(), row.end(), rows.begin() + r * d);
    }
    classifier.PredictProbaBatch(rows, probs);
    for (std::size_t r = 0; r < count; ++r) {
      certainty[ids[start + r]] =
          CertaintyScore(std::span<const double>(probs.data() + r * k, k));
    }
  }
  return certainty;
}

double EuclideanDistance(std::span<const double> a,
                         std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("EuclideanDistance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double GaussianScore(std::span<const double> x, const Dataset& data,
                     std::span<const ExampleId> labeled, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("GaussianScore: delta must be > 0");
  if (x.size() != data.dim()) {
    throw InvalidArgument("GaussianScore: dimension mismatch");
  }
  double sum = 0.0;
  for (const ExampleId z : labeled) {
    sum += std::exp(-EuclideanDistance(x, data.row(z)) / delta);
  }
  return sum;
}

double RandomScore(RngStream& rng) { return rng.Uniform01(); }

NeighborIndex::NeighborIndex(const Dataset& data, std::size_t neighbors)
    : neighbors_(neighbors) {
  const std::size_t n = data.size();
  if (neighbors < 1 || neighbors + 1 > n) {
    throw InvalidArgument("NeighborIndex: need 1 <= N <= n - 1");
  }
  nearest_.resize(n * neighbors);
  std::vector<ScoredId> candidates(n - 1);
  std::vector<std::size_t> in_degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.row(static_cast<ExampleId>(i));
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      candidates[c++] = {static_cast<ExampleId>(j),
                         EuclideanDistance(xi, data.row(static_cast<ExampleId>(j)))};
    }
    std::nth_element(candidates.begin(), candidates.begin() + (neighbors - 1),
                     candidates.end(), ScoredLess);
    std::sort(candidates.begin(), candidates.begin() + neighbors, ScoredLess);
    for (std::size_t k = 0; k < neighbors; ++k) {
      nearest_[i * neighbors + k] = candidates[k].id;
      ++in_degree[candidates[k].id];
    }
  }
  reverse_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    reverse_offsets_[i + 1] = reverse_offsets_[i] + in_degree[i];
  }
  reverse_.resize(reverse_offsets_[n]);
  std::vector<std::size_t> fill(reverse_offsets_.begin(),
                                reverse_offsets_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (const ExampleId j : NearestOf(static_cast<ExampleId>(i))) {
      reverse_[fill[j]++] = static_cast<ExampleId>(i);
    }
  }
}

double NeighborhoodScore(ExampleId x, const NeighborIndex& index,
                         const std::vector<bool>& is_labeled) {
  std::size_t hits = 0;
  for (const ExampleId y : index.NearestOf(x)) {
    if (y < is_labeled.size() && is_labeled[y]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(index.neighbors());
}

std::vector<ExampleId> BottomK(std::span<const ScoredId> entries,
                               std::size_t k) {
  if (k > entries.size()) {
    throw InvalidArgument("BottomK: k = " + std::to_string(k) +
                          " exceeds table size " +
                          std::to_string(entries.size()));
  }
  std::vector<ScoredId> work(entries.begin(), entries.end());
  if (k < work.size() && k > 0) {
    std::nth_element(work.begin(), work.begin() + (k - 1), work.end(),
                     ScoredLess);
  }
  std::sort(work.begin(), work.begin() + k, ScoredLess);
  std::vector<ExampleId> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = work[i].id;
  return out;
}

ScoreTable::ScoreTable(ExplorationScheme scheme, const Dataset& data,
                       std::span<const ExampleId> unlabeled)
    : scheme_(scheme),
      data_(&data),
      ids_(unlabeled.begin(), unlabeled.end()),
      position_(data.size(), kAbsent),
      scores_(data.size(), 0.0) {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const ExampleId id = ids_[i];
    if (id >= data.size() || position_[id] != kAbsent) {
      throw InvalidArgument("ScoreTable: unlabeled ids invalid or repeated");
    }
    position_[id] = i;
  }
}

ScoreTable ScoreTable::Random(const Dataset& data,
                              std::span<const ExampleId> unlabeled,
                              RngStream& rng) {
  ScoreTable table(ExplorationScheme::kRandom, data, unlabeled);
  for (const ExampleId id : table.ids_) table.scores_[id] = RandomScore(rng);
  return table;
}

ScoreTable ScoreTable::Gaussian(const Dataset& data,
                                std::span<const ExampleId> unlabeled,
                                std::span<const ExampleId> labeled,
                                double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("ScoreTable: delta must be > 0");
  ScoreTable table(ExplorationScheme::kGaussian, data, unlabeled);
  table.delta_ = delta;
  for (const ExampleId id : table.ids_) {
    table.scores_[id] = GaussianScore(data.row(id), data, labeled, delta);
  }
  return table;
}

ScoreTable ScoreTable::Neighborhood(
    const Dataset& data, std::span<const ExampleId> unlabeled,
    std::span<const ExampleId> labeled,
    std::shared_ptr<const NeighborIndex> index) {
  if (index == nullptr) throw InvalidArgument("ScoreTable: null index");
  ScoreTable table(ExplorationScheme::kNeighborhood, data, unlabeled);
  table.neighbors_ = std::move(index);
  table.labeled_.assign(data.size(), false);
  table.labeled_neighbors_.assign(data.size(), 0);
  for (const ExampleId z : labeled) {
    if (z >= data.size()) throw InvalidArgument("ScoreTable: bad labeled id");
    table.labeled_[z] = true;
  }
  const double n = static_cast<double>(table.neighbors_->neighbors());
  for (std::size_t x = 0; x < data.size(); ++x) {
    std::size_t hits = 0;
    for (const ExampleId y : table.neighbors_->NearestOf(static_cast<ExampleId>(x))) {
      if (table.labeled_[y]) ++hits;
    }
    table.labeled_neighbors_[x] = hits;
    table.scores_[x] = static_cast<double>(hits) / n;
  }
  return table;
}

ScoreTable ScoreTable::ForConfig(const HalConfig& config, const Dataset& data,
                                 std::span<const ExampleId> unlabeled,
                                 std::span<const ExampleId> labeled,
                                 RngStream& rng) {
  config.Validate();
  switch (config.scheme) {
    case ExplorationScheme::kRandom:
      return Random(data, unlabeled, rng);
    case ExplorationScheme::kGaussian:
      return Gaussian(data, unlabeled, labeled, config.delta);
    case ExplorationScheme::kNeighborhood:
      return Neighborhood(
          data, unlabeled, labeled,
          std::make_shared<NeighborIndex>(data, config.neighborhood_size));
  }
  throw InvalidArgument("ScoreTable: unknown scheme");
}

double ScoreTable::score(ExampleId id) const {
  if (!contains(id)) {
    throw InvalidArgument("ScoreTable: id " + std::to_string(id) +
                          " not in table");
  }
  return scores_[id];
}

ScoredId ScoreTable::ArgMin() const {
  if (ids_.empty()) throw PoolExhausted("ScoreTable: no unlabeled points left");
  ScoredId best{ids_[0], scores_[ids_[0]]};
  for (std::size_t i = 1; i < ids_.size(); ++i) {
    const ScoredId candidate{ids_[i], scores_[ids_[i]]};
    if (ScoredLess(candidate, best)) best = candidate;
  }
  return best;
}

void ScoreTable::Remove(ExampleId selected, RngStream& rng) {
  if (!contains(selected)) {
    throw InvalidArgument("ScoreTable: id " + std::to_string(selected) +
                          " not in table");
  }
  const std::size_t pos = position_[selected];
  const ExampleId last = ids_.back();
  ids_[pos] = last;
  position_[last] = pos;
  ids_.pop_back();
  position_[selected] = kAbsent;

  switch (scheme_) {
    case ExplorationScheme::kRandom:
      for (const ExampleId id : ids_) scores_[id] = RandomScore(rng);
      break;
    case ExplorationScheme::kGaussian: {
      const auto z = data_->row(selected);
      const double inv_delta = 1.0 / delta_;
      for (const ExampleId id : ids_) {
        scores_[id] += std::exp(-EuclideanDistance(data_->row(id), z) * inv_delta);
      }
      break;
    }
    case ExplorationScheme::kNeighborhood: {
      labeled_[selected] = true;
      const double n = static_cast<double>(neighbors_->neighbors());
      for (const ExampleId y : neighbors_->ReverseOf(selected)) {
        ++labeled_neighbors_[y];
        scores_[y] = static_cast<double>(labeled_neighbors_[y]) / n;
      }
      break;
    }
  }
}

std::vector<ExampleId> SelectionTrace::ids() const {
  std::vector<ExampleId> out;
  out.reserve(picks.size());
  for (const Pick& pick : picks) out.push_back(pick.id);
  return out;
}

SelectionTrace SelectBatch(const PoolState& pool,
                           std::span<const double> certainty,
                           ScoreTable& scores, const HalConfig& config,
                           RngStream& rng) {
  config.Validate();
  const std::size_t m = config.batch_size;
  const auto unlabeled = pool.unlabeled();
  if (unlabeled.size() < m) {
    throw PoolExhausted("SelectBatch: " + std::to_string(unlabeled.size()) +
                        " unlabeled points left, batch needs " +
                        std::to_string(m));
  }
  if (scores.size() != unlabeled.size()) {
    throw InvalidArgument("SelectBatch: score table out of sync with pool");
  }
  const bool has_classifier = !certainty.empty();

  // Certainty is fixed for the round, so the exploit branch only ever needs
  // the m least certain points: each earlier pick removes at most one of them.
  std::vector<ExampleId> exploit_order;
  if (has_classifier && config.trade_off > 0.0) {
    if (certainty.size() < pool.pool_size()) {
      throw InvalidArgument("SelectBatch: certainty table too small");
    }
    std::vector<ScoredId> entries;
    entries.reserve(unlabeled.size());
    for (const ExampleId id : unlabeled) entries.push_back({id, certainty[id]});
    exploit_order = BottomK(entries, m);
  }

  SelectionTrace trace;
  trace.picks.reserve(m);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const bool exploit = rng.Bernoulli(config.trade_off) && has_classifier;
    Pick pick{};
    if (exploit) {
      while (cursor < exploit_order.size() &&
             !scores.contains(exploit_order[cursor])) {
        ++cursor;
      }
      if (cursor == exploit_order.size()) {
        throw std::logic_error("SelectBatch: exploit candidates exhausted");
      }
      pick = {exploit_order[cursor], Branch::kExploit,
              certainty[exploit_order[cursor]]};
      ++cursor;
    } else {
      const ScoredId best = scores.ArgMin();
      pick = {best.id, Branch::kExplore, best.score};
    }
    scores.Remove(pick.id, rng);
    trace.picks.push_back(pick);
  }
  return trace;
}

SelectionTrace SelectBatch(const PoolState& pool, const Mlp* classifier,
                           const Dataset& data, ScoreTable& scores,
                           const HalConfig& config, RngStream& rng) {
  std::vector<double> certainty;
  if (classifier != nullptr) {
    certainty = ComputeCertainties(*classifier, data, pool.unlabeled());
  }
  return SelectBatch(pool, certainty, scores, config, rng);
}

std::string BranchName(Branch branch) {
  return branch == Branch::kExploit ? "exploit" : "explore";
}

void WriteTraceCsvHeader(std::ostream& out) {
  out << "round,pick_index,example_id,branch,score_at_selection\n";
}

void WriteTraceCsv(std::ostream& out, std::size_t round,
                   const SelectionTrace& trace) {
  for (std::size_t i = 0; i < trace.picks.size(); ++i) {
    const Pick& pick = trace.picks[i];
    out << round << ',' << i << ',' << pick.id << ',' << BranchName(pick.branch)
        << ',' << FormatNumber(pick.score) << '\n';
  }
}

}  // namespace hal
