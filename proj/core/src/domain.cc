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

#include "hal/domain.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace hal {

std::string FormatNumber(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

Dataset::Dataset(std::size_t dim, int num_classes, std::vector<double> features,
                 std::vector<Label> labels, std::vector<ExampleId> origin_ids)
    : dim_(dim),
      num_classes_(num_classes),
      features_(std::move(features)),
      labels_(std::move(labels)),
      origin_ids_(std::move(origin_ids)) {
  if (num_classes_ < 1) throw InvalidArgument("Dataset: num_classes < 1");
  if (features_.size() != labels_.size() * dim_) {
    throw InvalidArgument("Dataset: feature buffer size " +
                          std::to_string(features_.size()) + " != n*d = " +
                          std::to_string(labels_.size() * dim_));
  }
  if (labels_.size() > std::numeric_limits<ExampleId>::max()) {
    throw InvalidArgument("Dataset: too many rows for ExampleId");
  }
  if (origin_ids_.empty()) {
    origin_ids_.resize(labels_.size());
    std::iota(origin_ids_.begin(), origin_ids_.end(), ExampleId{0});
  } else if (origin_ids_.size() != labels_.size()) {
    throw InvalidArgument("Dataset: origin id count mismatch");
  }
  for (const Label y : labels_) {
    if (y < 1 || y > num_classes_) {
      throw InvalidArgument("Dataset: label " + std::to_string(y) +
                            " outside 1.." + std::to_string(num_classes_));
    }
    if (y == kPositiveClass) ++positive_count_;
  }
  for (const double v : features_) {
    if (!std::isfinite(v)) throw InvalidArgument("Dataset: non-finite feature");
  }
}

double Dataset::skew() const {
  if (labels_.empty()) return 0.0;
  return static_cast<double>(positive_count_) /
         static_cast<double>(labels_.size());
}

Dataset Dataset::Subset(std::span<const ExampleId> ids) const {
  std::vector<double> features;
  features.reserve(ids.size() * dim_);
  std::vector<Label> labels;
  labels.reserve(ids.size());
  std::vector<ExampleId> origin;
  origin.reserve(ids.size());
  for (const ExampleId id : ids) {
    if (id >= size()) throw InvalidArgument("Subset: id out of range");
    const auto r = row(id);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[id]);
    origin.push_back(origin_ids_[id]);
  }
  return Dataset(dim_, num_classes_, std::move(features), std::move(labels),
                 std::move(origin));
}

std::uint64_t Dataset::Fingerprint() const {
  std::uint64_t h = MixBits(dim_) ^ MixBits(size() + 0x100);
  for (const Label y : labels_) h = MixBits(h ^ static_cast<std::uint64_t>(y));
  for (const double v : features_) {
    h = MixBits(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

PoolValidationSplit SplitPoolValidation(const Dataset& dataset,
                                        std::size_t validation_size,
                                        RngStream& rng) {
  if (validation_size >= dataset.size()) {
    throw InvalidArgument("SplitPoolValidation: validation_size " +
                          std::to_string(validation_size) +
                          " must be < dataset size " +
                          std::to_string(dataset.size()));
  }
  std::vector<ExampleId> order(dataset.size());
  std::iota(order.begin(), order.end(), ExampleId{0});
  // Partial Fisher-Yates: the first validation_size slots are a uniform
  // random subset.
  for (std::size_t i = 0; i < validation_size; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.UniformInt(order.size() - i));
    std::swap(order[i], order[j]);
  }
  std::vector<ExampleId> validation(order.begin(),
                                    order.begin() + validation_size);
  std::vector<ExampleId> pool(order.begin() + validation_size, order.end());
  std::sort(validation.begin(), validation.end());
  std::sort(pool.begin(), pool.end());
  return {dataset.Subset(pool), dataset.Subset(validation)};
}

PoolState::PoolState(std::size_t pool_size)
    : unlabeled_(pool_size), position_(pool_size) {
  std::iota(unlabeled_.begin(), unlabeled_.end(), ExampleId{0});
  std::iota(position_.begin(), position_.end(), std::size_t{0});
}

void PoolState::RevealLabels(std::span<const ExampleId> batch) {
  std::vector<ExampleId> sorted(batch.begin(), batch.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const ExampleId id = sorted[i];
    if (id >= position_.size()) {
      throw InvalidArgument("RevealLabels: unknown id " + std::to_string(id));
    }
    if (position_[id] == kLabeled) {
      throw InvalidArgument("RevealLabels: id " + std::to_string(id) +
                            " already labeled");
    }
    if (i > 0 && sorted[i - 1] == id) {
      throw InvalidArgument("RevealLabels: id " + std::to_string(id) +
                            " repeated in batch");
    }
  }
  for (const ExampleId id : batch) {
    const std::size_t pos = position_[id];
    const ExampleId last = unlabeled_.back();
    unlabeled_[pos] = last;
    position_[last] = pos;
    unlabeled_.pop_back();
    position_[id] = kLabeled;
    labeled_.push_back(id);
  }
  ++round_;
}

}  // namespace hal
