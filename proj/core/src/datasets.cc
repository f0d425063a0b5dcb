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

#include "hal/datasets.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace hal {
namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct ClusterModel {
  std::vector<double> centers;  // num_clusters x dim
  std::vector<bool> positive;
};

ClusterModel DrawClusters(const SyntheticConfig& config, RngStream& rng) {
  ClusterModel model;
  const double center_sd = std::sqrt(config.center_variance);
  model.centers.resize(config.num_clusters * config.dim);
  for (double& c : model.centers) c = center_sd * rng.Normal();
  std::vector<std::size_t> order(config.num_clusters);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < config.num_positive_clusters; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.UniformInt(order.size() - i));
    std::swap(order[i], order[j]);
  }
  model.positive.assign(config.num_clusters, false);
  for (std::size_t i = 0; i < config.num_positive_clusters; ++i) {
    model.positive[order[i]] = true;
  }
  return model;
}

// Streams cluster draws until `size - positives` negatives and `positives`
// positives have been kept; surplus draws of a full class are discarded.
Dataset DrawPoints(const SyntheticConfig& config, const ClusterModel& model,
                   std::size_t size, std::size_t positives, RngStream& rng) {
  const std::size_t d = config.dim;
  const std::size_t negatives = size - positives;
  const double point_sd = std::sqrt(config.cluster_variance);
  std::vector<double> features;
  features.reserve(size * d);
  std::vector<Label> labels;
  labels.reserve(size);
  std::size_t kept_pos = 0;
  std::size_t kept_neg = 0;
  const std::size_t max_draws = config.max_oversample * std::max<std::size_t>(size, 1);
  for (std::size_t draws = 0; kept_pos < positives || kept_neg < negatives;
       ++draws) {
    if (draws >= max_draws) {
      throw InvalidArgument(
          "GenerateSynthetic: infeasible skew " +
          FormatNumber(config.target_skew) + " (kept " +
          std::to_string(kept_pos) + "/" + std::to_string(positives) +
          " positives after " + std::to_string(draws) + " draws)");
    }
    const std::size_t cluster =
        static_cast<std::size_t>(rng.UniformInt(config.num_clusters));
    const bool positive = model.positive[cluster];
    if (positive ? kept_pos >= positives : kept_neg >= negatives) continue;
    const double* center = model.centers.data() + cluster * d;
    for (std::size_t k = 0; k < d; ++k) {
      features.push_back(center[k] + point_sd * rng.Normal());
    }
    labels.push_back(positive ? kPositiveClass : kNegativeClass);
    ++(positive ? kept_pos : kept_neg);
  }
  // Kept points arrive class-clustered in time; shuffle so ids carry no
  // information about the label.
  std::vector<ExampleId> order(size);
  std::iota(order.begin(), order.end(), ExampleId{0});
  Shuffle(std::span<ExampleId>(order), rng);
  Dataset raw(d, 2, std::move(features), std::move(labels));
  Dataset shuffled = raw.Subset(order);
  return Dataset(d, 2,
                 std::vector<double>(shuffled.features().begin(),
                                     shuffled.features().end()),
                 std::vector<Label>(shuffled.labels().begin(),
                                    shuffled.labels().end()));
}

std::size_t PositivesFor(double skew, std::size_t size) {
  return static_cast<std::size_t>(std::llround(skew * static_cast<double>(size)));
}

std::uint32_t ReadBigEndian32(std::istream& in, const std::string& field) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    throw FormatError("IDX: truncated " + field);
  }
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
}

std::string Hex(std::uint32_t v) {
  std::ostringstream out;
  out << "0x" << std::hex << v;
  return out.str();
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (dim < 1) throw InvalidArgument("SyntheticConfig: dim must be >= 1");
  if (num_clusters < 1) {
    throw InvalidArgument("SyntheticConfig: num_clusters must be >= 1");
  }
  if (num_positive_clusters > num_clusters) {
    throw InvalidArgument(
        "SyntheticConfig: num_positive_clusters exceeds num_clusters");
  }
  if (!(target_skew > 0.0 && target_skew < 1.0)) {
    throw InvalidArgument("SyntheticConfig: target_skew must be in (0, 1)");
  }
  if (!(center_variance >= 0.0) || !(cluster_variance >= 0.0)) {
    throw InvalidArgument("SyntheticConfig: variances must be >= 0");
  }
  if (pool_size < 1) throw InvalidArgument("SyntheticConfig: pool_size must be >= 1");
  if (max_oversample < 1) {
    throw InvalidArgument("SyntheticConfig: max_oversample must be >= 1");
  }
}

SyntheticData GenerateSyntheticSplit(const SyntheticConfig& config,
                                     RngStream& rng) {
  config.Validate();
  const std::size_t pool_pos = PositivesFor(config.target_skew, config.pool_size);
  const std::size_t val_pos =
      PositivesFor(config.target_skew, config.validation_size);
  if ((pool_pos > 0 || val_pos > 0) && config.num_positive_clusters == 0) {
    throw InvalidArgument("GenerateSynthetic: infeasible skew with no positive clusters");
  }
  if (config.num_positive_clusters == config.num_clusters &&
      (pool_pos < config.pool_size || val_pos < config.validation_size)) {
    throw InvalidArgument("GenerateSynthetic: infeasible skew with no negative clusters");
  }
  const ClusterModel model = DrawClusters(config, rng);
  SyntheticData out;
  out.pool = DrawPoints(config, model, config.pool_size, pool_pos, rng);
  out.validation =
      DrawPoints(config, model, config.validation_size, val_pos, rng);
  return out;
}

Dataset GenerateSynthetic(const SyntheticConfig& config, RngStream& rng) {
  SyntheticData split = GenerateSyntheticSplit(config, rng);
  std::vector<double> features(split.pool.features().begin(),
                               split.pool.features().end());
  features.insert(features.end(), split.validation.features().begin(),
                  split.validation.features().end());
  std::vector<Label> labels(split.pool.labels().begin(),
                            split.pool.labels().end());
  labels.insert(labels.end(), split.validation.labels().begin(),
                split.validation.labels().end());
  return Dataset(config.dim, 2, std::move(features), std::move(labels));
}

DigitImages ParseMnist(std::istream& images, std::istream& labels) {
  const std::uint32_t image_magic = ReadBigEndian32(images, "images magic");
  if (image_magic != kIdxImagesMagic) {
    throw FormatError("IDX: images magic is " + Hex(image_magic) +
                      ", expected 0x803");
  }
  const std::uint32_t image_count = ReadBigEndian32(images, "images count");
  const std::uint32_t rows = ReadBigEndian32(images, "images rows");
  const std::uint32_t cols = ReadBigEndian32(images, "images cols");
  const std::uint32_t label_magic = ReadBigEndian32(labels, "labels magic");
  if (label_magic != kIdxLabelsMagic) {
    throw FormatError("IDX: labels magic is " + Hex(label_magic) +
                      ", expected 0x801");
  }
  const std::uint32_t label_count = ReadBigEndian32(labels, "labels count");
  if (image_count != label_count) {
    throw FormatError("IDX: images count " + std::to_string(image_count) +
                      " != labels count " + std::to_string(label_count));
  }
  if (rows == 0 || cols == 0) throw FormatError("IDX: zero image rows/cols");

  const std::size_t pixel_count =
      static_cast<std::size_t>(image_count) * rows * cols;
  std::vector<unsigned char> raw(pixel_count);
  if (!images.read(reinterpret_cast<char*>(raw.data()),
                   static_cast<std::streamsize>(pixel_count))) {
    throw FormatError("IDX: truncated images pixel data");
  }
  std::vector<unsigned char> raw_labels(label_count);
  if (!labels.read(reinterpret_cast<char*>(raw_labels.data()),
                   static_cast<std::streamsize>(label_count))) {
    throw FormatError("IDX: truncated labels data");
  }
  DigitImages out;
  out.rows = rows;
  out.cols = cols;
  out.pixels.resize(pixel_count);
  for (std::size_t i = 0; i < pixel_count; ++i) out.pixels[i] = raw[i] / 255.0;
  out.digits.resize(label_count);
  for (std::size_t i = 0; i < label_count; ++i) {
    if (raw_labels[i] > 9) {
      throw FormatError("IDX: labels value " + std::to_string(raw_labels[i]) +
                        " at index " + std::to_string(i) + " is not a digit");
    }
    out.digits[i] = raw_labels[i];
  }
  return out;
}

DigitImages LoadMnist(const std::string& images_path,
                      const std::string& labels_path) {
  std::ifstream images(images_path, std::ios::binary);
  if (!images) throw FormatError("IDX: cannot open images file " + images_path);
  std::ifstream labels(labels_path, std::ios::binary);
  if (!labels) throw FormatError("IDX: cannot open labels file " + labels_path);
  return ParseMnist(images, labels);
}

void MnistConfig::Validate() const {
  if (positive_digits.empty()) {
    throw InvalidArgument("MnistConfig: positive_digits is empty");
  }
  for (const int digit : positive_digits) {
    if (digit < 0 || digit > 9) {
      throw InvalidArgument("MnistConfig: positive digit out of 0..9");
    }
  }
  if (positive_digits.size() == 10) {
    throw InvalidArgument("MnistConfig: every digit is positive");
  }
  if (!(target_skew > 0.0 && target_skew < 1.0)) {
    throw InvalidArgument("MnistConfig: target_skew must be in (0, 1)");
  }
}

Dataset Binarize(const DigitImages& raw, const MnistConfig& config) {
  config.Validate();
  std::vector<Label> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    labels[i] = config.positive_digits.contains(raw.digits[i]) ? kPositiveClass
                                                               : kNegativeClass;
  }
  std::vector<double> features = raw.pixels;
  if (!config.scale_pixels) {
    for (double& v : features) v = std::round(v * 255.0);
  }
  return Dataset(raw.dim(), 2, std::move(features), std::move(labels));
}

Dataset BinarizeAndDownsample(const DigitImages& raw, const MnistConfig& config,
                              RngStream& rng) {
  if (raw.size() == 0) throw InvalidArgument("BinarizeAndDownsample: no examples");
  const Dataset all = Binarize(raw, config);
  std::vector<ExampleId> positives;
  for (ExampleId id = 0; id < all.size(); ++id) {
    if (all.is_positive(id)) positives.push_back(id);
  }
  const std::size_t negatives = all.size() - positives.size();
  const double s = config.target_skew;
  const std::size_t keep = static_cast<std::size_t>(
      std::llround(s * static_cast<double>(negatives) / (1.0 - s)));
  if (keep > positives.size()) {
    throw InvalidArgument("BinarizeAndDownsample: target skew " +
                          FormatNumber(s) + " exceeds natural positive fraction " +
                          FormatNumber(all.skew()));
  }
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.UniformInt(positives.size() - i));
    std::swap(positives[i], positives[j]);
  }
  std::vector<bool> kept(all.size(), true);
  for (std::size_t i = keep; i < positives.size(); ++i) kept[positives[i]] = false;
  std::vector<ExampleId> ids;
  ids.reserve(negatives + keep);
  for (ExampleId id = 0; id < all.size(); ++id) {
    if (kept[id]) ids.push_back(id);
  }
  return all.Subset(ids);
}

void WriteSnapshot(std::ostream& out, const Dataset& data) {
  out << "n,d,K,skew\n"
      << data.size() << ',' << data.dim() << ',' << data.num_classes() << ','
      << FormatNumber(data.skew()) << '\n';
  for (ExampleId id = 0; id < data.size(); ++id) {
    out << id << ',' << data.label(id);
    for (const double v : data.row(id)) out << ',' << FormatNumber(v);
    out << '\n';
  }
}

Dataset ReadSnapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,d,K,skew") {
    throw FormatError("snapshot: missing 'n,d,K,skew' header");
  }
  if (!std::getline(in, line)) throw FormatError("snapshot: missing header values");
  std::size_t n = 0, d = 0;
  int k = 0;
  double skew = 0.0;
  {
    std::istringstream header(line);
    char c1, c2, c3;
    if (!(header >> n >> c1 >> d >> c2 >> k >> c3 >> skew) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      throw FormatError("snapshot: malformed header values '" + line + "'");
    }
  }
  std::vector<double> features;
  features.reserve(n * d);
  std::vector<Label> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw FormatError("snapshot: expected " + std::to_string(n) +
                        " rows, found " + std::to_string(i));
    }
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (cell != std::to_string(i)) {
      throw FormatError("snapshot: row " + std::to_string(i) + " has id '" +
                        cell + "'");
    }
    if (!std::getline(row, cell, ',')) {
      throw FormatError("snapshot: row " + std::to_string(i) + " missing label");
    }
    try {
      labels.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw FormatError("snapshot: row " + std::to_string(i) +
                        " has bad label '" + cell + "'");
    }
    std::size_t values = 0;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || cell.empty()) {
        throw FormatError("snapshot: row " + std::to_string(i) +
                          " has bad feature '" + cell + "'");
      }
      features.push_back(v);
      ++values;
    }
    if (values != d) {
      throw FormatError("snapshot: row " + std::to_string(i) + " has " +
                        std::to_string(values) + " features, expected " +
                        std::to_string(d));
    }
  }
  Dataset data;
  try {
    data = Dataset(d, k, std::move(features), std::move(labels));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
  if (FormatNumber(data.skew()) != FormatNumber(skew)) {
    throw FormatError("snapshot: header skew " + FormatNumber(skew) +
                      " disagrees with labels (" + FormatNumber(data.skew()) +
                      ")");
  }
  return data;
}

void WriteSnapshotFile(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot " + path);
  WriteSnapshot(out, data);
  if (!out) throw std::runtime_error("error writing snapshot " + path);
}

Dataset ReadSnapshotFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("snapshot: cannot open " + path);
  return ReadSnapshot(in);
}

}  // namespace hal
