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


// Subcommand implementations behind the halsim binary. Each returns the
// process exit status: 0 ok, 1 runtime failure, 2 configuration error.

#ifndef HAL_TOOLS_COMMANDS_H_
#define HAL_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Options shared by the experiment subcommands. Precedence, lowest first:
// --scale preset, --config file, --set overrides, then --seed and --workers.
struct CommonOptions {
  std::optional<std::string> scale;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out_dir;
};

int GenData(const CommonOptions& options);
int Run(const CommonOptions& options);
int SweepSkew(const CommonOptions& options, const std::string& skews);
int SweepP(const CommonOptions& options, const std::string& p_range,
           const std::string& scheme);
int Inspect(const std::string& snapshot_path);
int Replay(const std::string& manifest_path, const std::string& out_dir);

// "a:b:step" or a comma-separated list. Values are rounded to 10 decimals
// so that 0.1 steps print as 0.3 rather than 0.30000000000000004.
std::vector<double> ParseValueList(const std::string& text);

}  // namespace hal::cli

#endif  // HAL_TOOLS_COMMANDS_H_
