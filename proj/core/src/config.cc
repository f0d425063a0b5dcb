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

#include "hal/config.h"

#include <charconv>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

namespace hal {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

double ParseReal(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + value + "'");
}

std::string JoinList(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i == 0 ? "" : ",") + items[i];
  }
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string& key,
                     const std::string& value)>
      set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define HAL_SIZE_FIELD(member)                                            \
  Field {                                                                 \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
      c.member = static_cast<std::size_t>(ParseUnsigned(k, v));           \
    },                                                                    \
        [](const ExperimentConfig& c) { return std::to_string(c.member); } \
  }
#define HAL_REAL_FIELD(member)                                            \
  Field {                                                                 \
    [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
      c.member = ParseReal(k, v);                                         \
    },                                                                    \
        [](const ExperimentConfig& c) { return FormatNumber(c.member); }  \
  }
#define HAL_PATH_FIELD(member)                                               \
  Field {                                                                    \
    [](ExperimentConfig& c, const std::string&, const std::string& v) {      \
      c.member = v;                                                          \
    },                                                                       \
        [](const ExperimentConfig& c) { return c.member; }                   \
  }

// Ordered; DescribeConfig emits keys in this order.
const std::vector<std::pair<std::string, Field>>& Fields() {
  static const auto* fields = new std::vector<std::pair<std::string, Field>>{
      {"experiment.name", HAL_PATH_FIELD(name)},
      {"experiment.seed",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) { c.seed = ParseUnsigned(k, v); },
             [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"experiment.repetitions", HAL_SIZE_FIELD(repetitions)},
      {"experiment.batch_size", HAL_SIZE_FIELD(batch_size)},
      {"experiment.max_rounds", HAL_SIZE_FIELD(max_rounds)},
      {"experiment.max_labels", HAL_SIZE_FIELD(max_labels)},
      {"experiment.workers", HAL_SIZE_FIELD(workers)},
      {"experiment.samplers",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               c.samplers = SplitList(v);
               HalConfig base;
               for (const std::string& name : c.samplers) {
                 try {
                   ParseSamplerName(name, base);
                 } catch (const std::exception& e) {
                   throw ConfigError(k, e.what());
                 }
               }
             },
             [](const ExperimentConfig& c) { return JoinList(c.samplers); }}},
      {"sampler.delta", HAL_REAL_FIELD(delta)},
      {"sampler.neighborhood_size", HAL_SIZE_FIELD(neighborhood_size)},
      {"dataset.kind",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               if (v == "synthetic") {
                 c.dataset.kind = DatasetKind::kSynthetic;
               } else if (v == "mnist") {
                 c.dataset.kind = DatasetKind::kMnist;
               } else if (v == "snapshot") {
                 c.dataset.kind = DatasetKind::kSnapshot;
               } else {
                 throw ConfigError(k, "expected synthetic, mnist or snapshot");
               }
             },
             [](const ExperimentConfig& c) {
               return DatasetKindName(c.dataset.kind);
             }}},
      {"dataset.skew",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) { c.dataset.set_skew(ParseReal(k, v)); },
             [](const ExperimentConfig& c) {
               return FormatNumber(c.dataset.skew());
             }}},
      {"dataset.redraw_per_repetition",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               c.dataset.redraw_per_repetition = ParseBool(k, v);
             },
             [](const ExperimentConfig& c) {
               return std::string(c.dataset.redraw_per_repetition ? "true"
                                                                  : "false");
             }}},
      {"dataset.pool_size", HAL_SIZE_FIELD(dataset.synthetic.pool_size)},
      {"dataset.validation_size",
       HAL_SIZE_FIELD(dataset.synthetic.validation_size)},
      {"dataset.dim", HAL_SIZE_FIELD(dataset.synthetic.dim)},
      {"dataset.num_clusters", HAL_SIZE_FIELD(dataset.synthetic.num_clusters)},
      {"dataset.num_positive_clusters",
       HAL_SIZE_FIELD(dataset.synthetic.num_positive_clusters)},
      {"dataset.center_variance",
       HAL_REAL_FIELD(dataset.synthetic.center_variance)},
      {"dataset.cluster_variance",
       HAL_REAL_FIELD(dataset.synthetic.cluster_variance)},
      {"dataset.max_oversample",
       HAL_SIZE_FIELD(dataset.synthetic.max_oversample)},
      {"dataset.positive_digits",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               std::set<int> digits;
               for (const std::string& item : SplitList(v)) {
                 digits.insert(static_cast<int>(ParseUnsigned(k, item)));
               }
               c.dataset.mnist.positive_digits = digits;
             },
             [](const ExperimentConfig& c) {
               std::vector<std::string> items;
               for (const int d : c.dataset.mnist.positive_digits) {
                 items.push_back(std::to_string(d));
               }
               return JoinList(items);
             }}},
      {"dataset.match_validation_skew",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               c.dataset.mnist.match_validation_skew = ParseBool(k, v);
             },
             [](const ExperimentConfig& c) {
               return std::string(
                   c.dataset.mnist.match_validation_skew ? "true" : "false");
             }}},
      {"dataset.scale_pixels",
       Field{[](ExperimentConfig& c, const std::string& k,
                const std::string& v) {
               c.dataset.mnist.scale_pixels = ParseBool(k, v);
             },
             [](const ExperimentConfig& c) {
               return std::string(c.dataset.mnist.scale_pixels ? "true" : "false");
             }}},
      {"dataset.mnist_train_images", HAL_PATH_FIELD(dataset.mnist_train_images)},
      {"dataset.mnist_train_labels", HAL_PATH_FIELD(dataset.mnist_train_labels)},
      {"dataset.mnist_test_images", HAL_PATH_FIELD(dataset.mnist_test_images)},
      {"dataset.mnist_test_labels", HAL_PATH_FIELD(dataset.mnist_test_labels)},
      {"dataset.snapshot", HAL_PATH_FIELD(dataset.snapshot_path)},
      {"classifier.hidden_width", HAL_SIZE_FIELD(classifier.hidden_width)},
      {"classifier.hidden_layers", HAL_SIZE_FIELD(classifier.num_hidden_layers)},
      {"classifier.learning_rate", HAL_REAL_FIELD(classifier.learning_rate)},
      {"classifier.epochs", HAL_SIZE_FIELD(classifier.epochs)},
      {"classifier.minibatch_size", HAL_SIZE_FIELD(classifier.minibatch_size)},
      {"classifier.init_scale", HAL_REAL_FIELD(classifier.init_scale)},
      {"classifier.adagrad_epsilon", HAL_REAL_FIELD(classifier.adagrad_epsilon)},
  };
  return *fields;
}

#undef HAL_SIZE_FIELD
#undef HAL_REAL_FIELD
#undef HAL_PATH_FIELD

}  // namespace

void ApplySetting(ExperimentConfig& config, const std::string& key,
                  const std::string& value) {
  for (const auto& [name, field] : Fields()) {
    if (name == key) {
      field.set(config, key, Trim(value));
      return;
    }
  }
  throw ConfigError(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> ParseConfigText(
    std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "line " + std::to_string(number) +
                                  " is not 'key = value'");
    }
    out.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  return out;
}

void ApplyConfigText(ExperimentConfig& config, std::istream& in) {
  for (const auto& [key, value] : ParseConfigText(in)) {
    ApplySetting(config, key, value);
  }
}

std::string DescribeConfig(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, field] : Fields()) {
    out += name + " = " + field.get(config) + "\n";
  }
  return out;
}

const std::vector<std::string>& ConfigKeys() {
  static const auto* keys = [] {
    auto* k = new std::vector<std::string>();
    for (const auto& [name, field] : Fields()) k->push_back(name);
    return k;
  }();
  return *keys;
}

}  // namespace hal
