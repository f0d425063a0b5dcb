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

#ifndef HAL_SAMPLING_H_
#define HAL_SAMPLING_H_

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hal/classifier.h"
#include "hal/domain.h"
#include "hal/rng.h"

namespace hal {

enum class ExplorationScheme { kRandom, kGaussian, kNeighborhood };

std::string SchemeName(ExplorationScheme scheme);
// Accepts "random", "gaussian", "neighborhood". Throws InvalidArgument.
ExplorationScheme ParseScheme(const std::string& name);

struct HalConfig {
  // Probability that a pick uses the exploit (margin) branch.
  double trade_off = 0.5;
  std::size_t batch_size = 100;
  ExplorationScheme scheme = ExplorationScheme::kGaussian;
  // Length scale of the Gaussian exploration kernel.
  double delta = 10.0;
  // Neighbourhood size for the neighbourhood scheme.
  std::size_t neighborhood_size = 10;

  void Validate() const;
  // "HAL-R(0.5)", "HAL-G(1)", "HAL-N(0.3)".
  std::string Name() const;
};

// Parses a sampler name: "HAL-R(p)", "HAL-G(p)", "HAL-N(p)", or the aliases
// "margin" (HAL-R(1)) and "random" (HAL-R(0)). Other fields keep `base`.
HalConfig ParseSamplerName(const std::string& name, const HalConfig& base);

// |max - second max| of the prediction vector. Throws InvalidArgument when
// fewer than two classes are present.
double CertaintyScore(std::span<const double> probs);

// Certainty for every id in `ids`, written to a table indexed by id (entries
// for other ids are left at +inf).
std::vector<double> ComputeCertainties(const Mlp& classifier,
                                       const Dataset& data,
                                       std::span<const ExampleId> ids);

double EuclideanDistance(std::span<const double> a, std::span<const double> b);

// Sum over `labeled` of exp(-||x - z||_2 / delta). Unsquared norm.
double GaussianScore(std::span<const double> x, const Dataset& data,
                     std::span<const ExampleId> labeled, double delta);

double RandomScore(RngStream& rng);

// For each point, its N nearest other points (Euclidean, ties by lower id)
// and the reverse relation.
class NeighborIndex {
 public:
  // Brute force O(n^2 d). Throws InvalidArgument unless 1 <= N <= n - 1.
  NeighborIndex(const Dataset& data, std::size_t neighbors);

  std::size_t neighbors() const { return neighbors_; }
  std::span<const ExampleId> NearestOf(ExampleId id) const {
    return {nearest_.data() + static_cast<std::size_t>(id) * neighbors_,
            neighbors_};
  }
  // Ids whose neighbourhood contains `id`.
  std::span<const ExampleId> ReverseOf(ExampleId id) const {
    return {reverse_.data() + reverse_offsets_[id],
            reverse_offsets_[id + 1] - reverse_offsets_[id]};
  }

 private:
  std::size_t neighbors_;
  std::vector<ExampleId> nearest_;
  std::vector<ExampleId> reverse_;
  std::vector<std::size_t> reverse_offsets_;
};

// Fraction of x's N nearest neighbours that are in `is_labeled`.
double NeighborhoodScore(ExampleId x, const NeighborIndex& index,
                         const std::vector<bool>& is_labeled);

struct ScoredId {
  ExampleId id;
  double score;
};

// The k entries with the smallest (score, id), in ascending order. Uses
// partial selection, so the cost is linear in entries.size() plus k log k.
// Throws InvalidArgument if k > entries.size().
std::vector<ExampleId> BottomK(std::span<const ScoredId> entries,
                               std::size_t k);

// Exploration scores s(x) for the current unlabeled ids.
//
// Holds a pointer to the dataset it was built from; the dataset must
// outlive the table. Selected points count as labeled as soon as Remove()
// is called.
class ScoreTable {
 public:
  static ScoreTable Random(const Dataset& data,
                           std::span<const ExampleId> unlabeled,
                           RngStream& rng);
  static ScoreTable Gaussian(const Dataset& data,
                             std::span<const ExampleId> unlabeled,
                             std::span<const ExampleId> labeled, double delta);
  static ScoreTable Neighborhood(const Dataset& data,
                                 std::span<const ExampleId> unlabeled,
                                 std::span<const ExampleId> labeled,
                                 std::shared_ptr<const NeighborIndex> index);
  // Builds the table `config.scheme` calls for.
  static ScoreTable ForConfig(const HalConfig& config, const Dataset& data,
                              std::span<const ExampleId> unlabeled,
                              std::span<const ExampleId> labeled,
                              RngStream& rng);

  ExplorationScheme scheme() const { return scheme_; }
  double delta() const { return delta_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(ExampleId id) const {
    return id < position_.size() && position_[id] != kAbsent;
  }
  // Throws InvalidArgument if `id` is not in the table.
  double score(ExampleId id) const;
  // Current ids, unordered.
  std::span<const ExampleId> ids() const { return ids_; }

  // Entry with the smallest (score, id). Throws PoolExhausted when empty.
  ScoredId ArgMin() const;

  // Drops `selected` and updates the remaining scores as if it were labeled:
  // Gaussian adds its kernel term, random redraws every entry, neighbourhood
  // recomputes the points whose neighbourhood contains it.
  // Throws InvalidArgument if `selected` is not in the table.
  void Remove(ExampleId selected, RngStream& rng);

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  ScoreTable(ExplorationScheme scheme, const Dataset& data,
             std::span<const ExampleId> unlabeled);

  ExplorationScheme scheme_;
  const Dataset* data_;
  double delta_ = 0.0;
  std::shared_ptr<const NeighborIndex> neighbors_;
  std::vector<ExampleId> ids_;
  std::vector<std::size_t> position_;
  // Indexed by id.
  std::vector<double> scores_;
  // Neighbourhood scheme: labeled membership and labeled-neighbour counts.
  std::vector<bool> labeled_;
  std::vector<std::size_t> labeled_neighbors_;
};

enum class Branch { kExploit, kExplore };

struct Pick {
  ExampleId id;
  Branch branch;
  // Certainty for exploit picks, exploration score for explore picks.
  double score;
};

struct SelectionTrace {
  std::vector<Pick> picks;

  std::vector<ExampleId> ids() const;
};

// One batch of the hybrid loop. For each of the m picks a Bernoulli(p) draw
// chooses the exploit branch (lowest certainty among the remaining pool) or
// the explore branch (lowest exploration score); the pick is removed from
// `scores`, which updates the remaining scores, before the next draw.
//
// `certainty` is indexed by id and computed once for the round; pass an
// empty span when no classifier exists yet, in which case every pick uses
// the exploration score. `scores` must hold exactly pool.unlabeled().
// Throws PoolExhausted if fewer than m points remain.
SelectionTrace SelectBatch(const PoolState& pool,
                           std::span<const double> certainty,
                           ScoreTable& scores, const HalConfig& config,
                           RngStream& rng);

// Convenience overload computing the certainties from `classifier` (may be
// null for the cold start).
SelectionTrace SelectBatch(const PoolState& pool, const Mlp* classifier,
                           const Dataset& data, ScoreTable& scores,
                           const HalConfig& config, RngStream& rng);

std::string BranchName(Branch branch);

// CSV lines "round,pick_index,example_id,branch,score_at_selection".
void WriteTraceCsvHeader(std::ostream& out);
void WriteTraceCsv(std::ostream& out, std::size_t round,
                   const SelectionTrace& trace);

}  // namespace hal

#endif  // HAL_SAMPLING_H_
