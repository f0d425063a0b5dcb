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

#ifndef HAL_DATASETS_H_
#define HAL_DATASETS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hal/domain.h"
#include "hal/rng.h"

namespace hal {

// Raised for malformed input files; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gaussian clusters, a few of them positive, downsampled to a target skew.
struct SyntheticConfig {
  std::size_t dim = 10;
  std::size_t num_clusters = 300;
  // Per-component variance of the cluster centres around the origin.
  double center_variance = 8.0;
  // Per-component variance of points around their centre.
  double cluster_variance = 4.0;
  std::size_t num_positive_clusters = 10;
  double target_skew = 0.005;
  std::size_t pool_size = 100000;
  std::size_t validation_size = 10000;
  // Generation gives up (infeasible skew) after this many candidate points
  // per emitted point.
  std::size_t max_oversample = 200;

  void Validate() const;
};

struct SyntheticData {
  Dataset pool;
  Dataset validation;
};

// Pool and validation drawn from the same cluster centres and positive
// clusters, each with round(target_skew * size) positives. Points are
// assigned to clusters uniformly at random; surplus points of either class
// are discarded and the survivors shuffled. Throws InvalidArgument when the
// skew cannot be reached within max_oversample.
SyntheticData GenerateSyntheticSplit(const SyntheticConfig& config,
                                     RngStream& rng);

// Pool followed by validation as one dataset of pool_size + validation_size
// rows.
Dataset GenerateSynthetic(const SyntheticConfig& config, RngStream& rng);

// Raw digit images. Pixels are scaled to [0, 1].
struct DigitImages {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;
  std::vector<int> digits;

  std::size_t size() const { return digits.size(); }
  std::size_t dim() const { return rows * cols; }
};

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
// Throws FormatError on a bad magic number, truncated data, or a count
// mismatch; nothing is returned on failure.
DigitImages LoadMnist(const std::string& images_path,
                      const std::string& labels_path);
DigitImages ParseMnist(std::istream& images, std::istream& labels);

struct MnistConfig {
  std::set<int> positive_digits = {0, 1, 4};
  double target_skew = 0.015;
  // Downsample the validation file to the same skew.
  bool match_validation_skew = true;
  // Features in [0, 1]; false keeps raw 0..255 intensities.
  bool scale_pixels = true;

  void Validate() const;
};

// Maps digits to positive/negative and removes positives uniformly at
// random until round(s * neg / (1 - s)) remain; negatives are untouched.
// Throws InvalidArgument if the target exceeds the natural positive
// fraction or `raw` is empty.
Dataset BinarizeAndDownsample(const DigitImages& raw, const MnistConfig& config,
                              RngStream& rng);
// Label mapping only.
Dataset Binarize(const DigitImages& raw, const MnistConfig& config);

// Snapshot CSV: a "n,d,K,skew" header line with its values, then one
// "id,label,f_1,...,f_d" row per example. Numbers round-trip exactly.
void WriteSnapshot(std::ostream& out, const Dataset& data);
Dataset ReadSnapshot(std::istream& in);
void WriteSnapshotFile(const std::string& path, const Dataset& data);
Dataset ReadSnapshotFile(const std::string& path);

}  // namespace hal

#endif  // HAL_DATASETS_H_
