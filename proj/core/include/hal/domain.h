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

#ifndef HAL_DOMAIN_H_
#define HAL_DOMAIN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hal/rng.h"

namespace hal {

// Dense example index; a Dataset of size n uses exactly 0..n-1.
using ExampleId = std::uint32_t;

// 1-based class index in {1..K}.
using Label = int;

// Binary runs treat class 2 as the positive (minority) class.
inline constexpr Label kNegativeClass = 1;
inline constexpr Label kPositiveClass = 2;

// Owned feature vector, used where a row does not live in a Dataset.
using FeatureVector = std::vector<double>;

// Shortest decimal text that round-trips to the same double ("0.1", "1e-05",
// "2"). Locale independent, so CSV output is byte-stable.
std::string FormatNumber(double value);

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PoolExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable store of feature rows and labels.
//
// Rows are kept in one row-major buffer so that per-id access is a pointer
// offset. A Dataset carved out of another one (see Subset) remembers the ids
// its rows had in the source via origin_ids().
class Dataset {
 public:
  Dataset() = default;
  // Throws InvalidArgument when sizes disagree, a label is outside {1..K},
  // or a feature is not finite.
  Dataset(std::size_t dim, int num_classes, std::vector<double> features,
          std::vector<Label> labels, std::vector<ExampleId> origin_ids = {});

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t dim() const { return dim_; }
  int num_classes() const { return num_classes_; }

  std::span<const double> row(ExampleId id) const {
    return {features_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  Label label(ExampleId id) const { return labels_[id]; }
  bool is_positive(ExampleId id) const { return labels_[id] == kPositiveClass; }

  std::span<const double> features() const { return features_; }
  std::span<const Label> labels() const { return labels_; }
  // Id of each row in the dataset it was carved from (identity otherwise).
  std::span<const ExampleId> origin_ids() const { return origin_ids_; }

  std::size_t positive_count() const { return positive_count_; }
  // Fraction of rows with the positive label; 0 for an empty dataset.
  double skew() const;

  // Rows `ids` in the given order, renumbered 0..k-1. Origin ids compose so
  // they always refer to the outermost source.
  Dataset Subset(std::span<const ExampleId> ids) const;

  // Order-sensitive 64-bit hash of dims, labels and feature bits.
  std::uint64_t Fingerprint() const;

 private:
  std::size_t dim_ = 0;
  int num_classes_ = 2;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::vector<ExampleId> origin_ids_;
  std::size_t positive_count_ = 0;
};

struct PoolValidationSplit {
  Dataset pool;
  Dataset validation;
};

// Uniformly random disjoint split. Both parts keep the source row order and
// record source ids in origin_ids(). Throws InvalidArgument unless
// validation_size < dataset.size().
PoolValidationSplit SplitPoolValidation(const Dataset& dataset,
                                        std::size_t validation_size,
                                        RngStream& rng);

// Partition of a pool into unlabeled U_t and labeled L_t.
class PoolState {
 public:
  explicit PoolState(std::size_t pool_size);

  std::size_t pool_size() const { return position_.size(); }
  std::size_t round() const { return round_; }

  // Unordered; stable only between mutations.
  std::span<const ExampleId> unlabeled() const { return unlabeled_; }
  // In the order labels were revealed.
  std::span<const ExampleId> labeled() const { return labeled_; }

  bool is_labeled(ExampleId id) const { return position_.at(id) == kLabeled; }

  // Moves `batch` from U to L and advances the round. Throws InvalidArgument
  // if an id is unknown, already labeled, or repeated in the batch.
  void RevealLabels(std::span<const ExampleId> batch);

 private:
  static constexpr std::size_t kLabeled = static_cast<std::size_t>(-1);

  std::vector<ExampleId> unlabeled_;
  std::vector<ExampleId> labeled_;
  // Index into unlabeled_, or kLabeled.
  std::vector<std::size_t> position_;
  std::size_t round_ = 0;
};

}  // namespace hal

#endif  // HAL_DOMAIN_H_
