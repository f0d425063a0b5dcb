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

#ifndef HAL_CONFIG_H_
#define HAL_CONFIG_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hal/experiment.h"

namespace hal {

// A configuration key was unknown or its value unusable.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Sets one documented key (see README). Throws ConfigError.
void ApplySetting(ExperimentConfig& config, const std::string& key,
                  const std::string& value);

// "key = value" lines; '#' starts a comment; blank lines are ignored.
// Throws ConfigError on a malformed line.
std::vector<std::pair<std::string, std::string>> ParseConfigText(
    std::istream& in);

// Parses and applies every line of `in`, in order.
void ApplyConfigText(ExperimentConfig& config, std::istream& in);

// Every key with its current value, one "key = value" line each, in a fixed
// order. Feeding the text back through ApplyConfigText reproduces `config`.
std::string DescribeConfig(const ExperimentConfig& config);

// All keys ApplySetting accepts.
const std::vector<std::string>& ConfigKeys();

}  // namespace hal

#endif  // HAL_CONFIG_H_
