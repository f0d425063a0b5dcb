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


#include "commands.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "hal/config.h"
#include "hal/datasets.h"
#include "hal/experiment.h"
#include "hal/results_io.h"
#include "json.hpp"

#ifndef HAL_VERSION
#define HAL_VERSION "unknown"
#endif

namespace hal::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kResultsFile = "results.csv";
constexpr const char* kAggregateFile = "aggregate.csv";
constexpr const char* kSnapshotFile = "snapshot.csv";
constexpr const char* kManifestFile = "manifest.json";

// Everything needed to execute (and later replay) one subcommand.
struct Invocation {
  std::string command;
  std::string scale;
  ExperimentConfig config;
  std::string skews;
  std::string p_range;
  std::string scheme;
};

struct Output {
  std::string name;
  std::string contents;
};

int ReportConfigError(const std::string& message) {
  std::cerr << "halsim: config error: " << message << '\n';
  return kExitConfig;
}

int ReportRuntimeError(const std::string& message) {
  std::cerr << "halsim: error: " << message << '\n';
  return kExitRuntime;
}

ExperimentConfig BuildConfig(const CommonOptions& options,
                             const std::string& scale) {
  ExperimentConfig config;
  if (!scale.empty()) {
    try {
      config = ConfigForScale(scale);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--scale", e.what());
    }
  }
  if (!options.config_path.empty()) {
    std::ifstream in(options.config_path);
    if (!in) throw ConfigError("--config", "cannot read " + options.config_path);
    ApplyConfigText(config, in);
  }
  for (const std::string& entry : options.overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(entry, "--set expects key=value");
    }
    ApplySetting(config, entry.substr(0, eq), entry.substr(eq + 1));
  }
  if (options.seed) config.seed = *options.seed;
  if (options.workers) config.workers = *options.workers;
  return config;
}

std::vector<double> SkewList(const Invocation& run) {
  const std::vector<double> skews = ParseValueList(run.skews);
  for (const double s : skews) {
    if (!(s > 0.0 && s < 1.0)) {
      throw ConfigError("--skews", "skew " + FormatNumber(s) + " not in (0, 1)");
    }
  }
  return skews;
}

// Fills in derived settings and rejects invalid configurations before any
// file is written.
void Prepare(Invocation& run) {
  if (run.command == "sweep-p") {
    std::vector<double> ps;
    try {
      ps = ParseValueList(run.p_range);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--p", e.what());
    }
    ExplorationScheme scheme;
    try {
      scheme = ParseScheme(run.scheme);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--scheme", e.what());
    }
    run.config.samplers.clear();
    for (const double p : ps) {
      HalConfig sampler;
      sampler.scheme = scheme;
      sampler.trade_off = p;
      run.config.samplers.push_back(sampler.Name());
    }
  }
  if (run.command == "sweep-skew") {
    try {
      SkewList(run);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--skews", e.what());
    }
  }
  try {
    if (run.command == "gen-data") {
      if (run.config.dataset.kind == DatasetKind::kSnapshot) {
        throw ConfigError("dataset.kind", "gen-data needs synthetic or mnist");
      }
      ExperimentConfig check = run.config;
      check.samplers = {"margin"};
      check.Validate();
    } else {
      run.config.Validate();
    }
  } catch (const InvalidArgument& e) {
    const std::string message = e.what();
    throw ConfigError(message.substr(0, message.find(' ')), message);
  }
}

std::string ResultsText(std::span<const RunRecord> records) {
  std::ostringstream out;
  WriteResultsCsv(out, records);
  return out.str();
}

std::string AggregateText(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  WriteAggregateCsv(out, rows);
  return out.str();
}

std::vector<Output> Execute(const Invocation& run) {
  const ExperimentConfig& config = run.config;
  if (run.command == "gen-data") {
    RngStream rng = RngStream(config.seed, 0).Derive(StreamPurpose::kDataGen);
    Dataset data;
    if (config.dataset.kind == DatasetKind::kSynthetic) {
      data = GenerateSynthetic(config.dataset.synthetic, rng);
    } else {
      data = BinarizeAndDownsample(LoadMnist(config.dataset.mnist_train_images,
                                             config.dataset.mnist_train_labels),
                                   config.dataset.mnist, rng);
    }
    std::ostringstream out;
    WriteSnapshot(out, data);
    std::cout << "generated " << data.size() << " examples, skew "
              << FormatNumber(data.skew()) << '\n';
    return {{kSnapshotFile, out.str()}};
  }
  std::vector<ExperimentResult> results;
  if (run.command == "sweep-skew") {
    const std::vector<double> skews = SkewList(run);
    results = SkewSweep(config, skews).results;
  } else {
    results.push_back(RunExperiment(config));
  }
  std::vector<RunRecord> records;
  std::vector<AggregateRow> aggregate;
  for (const ExperimentResult& result : results) {
    records.insert(records.end(), result.records.begin(), result.records.end());
    aggregate.insert(aggregate.end(), result.aggregate.begin(),
                     result.aggregate.end());
  }
  std::cout << "completed " << records.size() << " run records over "
            << results.size() << " experiment(s)\n";
  return {{kResultsFile, ResultsText(records)},
          {kAggregateFile, AggregateText(aggregate)}};
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json Manifest(const Invocation& run, const std::vector<Output>& outputs,
              double wall_seconds) {
  Json config = Json::object();
  std::istringstream described(DescribeConfig(run.config));
  for (const auto& [key, value] : ParseConfigText(described)) config[key] = value;
  Json parameters = Json::object();
  if (run.command == "sweep-skew") parameters["skews"] = run.skews;
  if (run.command == "sweep-p") {
    parameters["p"] = run.p_range;
    parameters["scheme"] = run.scheme;
  }
  Json files = Json::array();
  for (const Output& output : outputs) files.push_back(output.name);
  Json manifest;
  manifest["tool"] = "halsim";
  manifest["version"] = HAL_VERSION;
  manifest["command"] = run.command;
  manifest["scale"] = run.scale;
  manifest["seed"] = run.config.seed;
  manifest["workers"] = run.config.workers;
  manifest["parameters"] = parameters;
  manifest["metrics"] = {
      {"auc_pr", "average precision: sum of recall steps times precision"},
      {"recall_at_p90", "max recall with precision >= 0.9; 0 when unattainable"},
      {"recall_at_p80", "max recall with precision >= 0.8; 0 when unattainable"}};
  manifest["config"] = config;
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["files"] = files;
  return manifest;
}

// Runs a prepared invocation and writes its outputs plus a manifest.
int ExecuteAndWrite(const Invocation& run, const fs::path& out_dir) {
  std::vector<Output> outputs;
  const auto start = std::chrono::steady_clock::now();
  try {
    outputs = Execute(run);
  } catch (const std::exception& e) {
    return ReportRuntimeError(e.what());
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  try {
    fs::create_directories(out_dir);
    for (const Output& output : outputs) {
      WriteFile(out_dir / output.name, output.contents);
    }
    WriteFile(out_dir / kManifestFile, Manifest(run, outputs, wall).dump(2) + "\n");
  } catch (const std::exception& e) {
    return ReportRuntimeError(e.what());
  }
  for (const Output& output : outputs) {
    std::cout << "wrote " << (out_dir / output.name).string() << '\n';
  }
  return kExitOk;
}

int Start(Invocation run, const CommonOptions& options) {
  try {
    Prepare(run);
  } catch (const ConfigError& e) {
    return ReportConfigError(e.what());
  }
  return ExecuteAndWrite(run, options.out_dir);
}

Invocation FromOptions(const std::string& command, const CommonOptions& options,
                       const std::string& default_scale) {
  Invocation run;
  run.command = command;
  run.scale = options.scale.value_or(default_scale);
  run.config = BuildConfig(options, run.scale);
  return run;
}

template <typename Body>
int WithConfig(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return ReportConfigError(e.what());
  }
}

}  // namespace

std::vector<double> ParseValueList(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) {
      throw InvalidArgument("bad number '" + s + "' in '" + text + "'");
    }
    return v;
  };
  auto round10 = [](double v) { return std::round(v * 1e10) / 1e10; };
  std::vector<std::string> parts;
  const char separator = text.find(':') != std::string::npos ? ':' : ',';
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, separator);) parts.push_back(part);
  std::vector<double> out;
  if (separator == ':') {
    if (parts.size() != 3) throw InvalidArgument("range must be start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw InvalidArgument("range needs step > 0 and stop >= start");
    }
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(round10(start + static_cast<double>(i) * step));
    }
  } else {
    for (const std::string& part : parts) out.push_back(round10(number(part)));
  }
  if (out.empty()) throw InvalidArgument("empty value list");
  return out;
}

int GenData(const CommonOptions& options) {
  return WithConfig([&] {
    return Start(FromOptions("gen-data", options, ""), options);
  });
}

int Run(const CommonOptions& options) {
  return WithConfig([&] {
    return Start(FromOptions("run", options, "desk"), options);
  });
}

int SweepSkew(const CommonOptions& options, const std::string& skews) {
  return WithConfig([&] {
    Invocation run = FromOptions("sweep-skew", options, "desk");
    run.skews = skews;
    return Start(std::move(run), options);
  });
}

int SweepP(const CommonOptions& options, const std::string& p_range,
           const std::string& scheme) {
  return WithConfig([&] {
    Invocation run = FromOptions("sweep-p", options, "desk");
    run.p_range = p_range;
    run.scheme = scheme;
    return Start(std::move(run), options);
  });
}

int Inspect(const std::string& snapshot_path) {
  try {
    const Dataset data = ReadSnapshotFile(snapshot_path);
    std::cout << "snapshot " << snapshot_path << '\n'
              << "  examples:    " << data.size() << '\n'
              << "  dimension:   " << data.dim() << '\n'
              << "  classes:     " << data.num_classes() << '\n'
              << "  positives:   " << data.positive_count() << '\n'
              << "  skew:        " << FormatNumber(data.skew()) << '\n'
              << "  fingerprint: " << std::hex << data.Fingerprint() << std::dec
              << '\n';
  } catch (const std::exception& e) {
    return ReportRuntimeError(e.what());
  }
  return kExitOk;
}

int Replay(const std::string& manifest_path, const std::string& out_dir) {
  Json manifest;
  Invocation run;
  try {
    manifest = Json::parse(ReadFile(manifest_path));
    run.command = manifest.at("command").get<std::string>();
    run.scale = manifest.at("scale").get<std::string>();
    for (const auto& [key, value] : manifest.at("config").items()) {
      ApplySetting(run.config, key, value.get<std::string>());
    }
    const Json& parameters = manifest.at("parameters");
    run.skews = parameters.value("skews", "");
    run.p_range = parameters.value("p", "");
    run.scheme = parameters.value("scheme", "");
    Prepare(run);
  } catch (const ConfigError& e) {
    return ReportConfigError(e.what());
  } catch (const std::exception& e) {
    return ReportConfigError(std::string("manifest ") + manifest_path + ": " +
                             e.what());
  }
  const fs::path original = fs::path(manifest_path).parent_path();
  const bool scratch = out_dir.empty();
  const fs::path target =
      scratch ? fs::temp_directory_path() /
                    ("halsim-replay-" + std::to_string(std::hash<std::string>{}(
                                            fs::absolute(manifest_path).string())))
              : fs::path(out_dir);
  if (const int status = ExecuteAndWrite(run, target); status != kExitOk) {
    return status;
  }
  std::vector<std::string> mismatched;
  try {
    for (const auto& name : manifest.at("files")) {
      const std::string file = name.get<std::string>();
      if (ReadFile(original / file) != ReadFile(target / file)) {
        mismatched.push_back(file);
      }
    }
  } catch (const std::exception& e) {
    return ReportRuntimeError(e.what());
  }
  if (scratch) fs::remove_all(target);
  if (!mismatched.empty()) {
    std::cout << "mismatch:";
    for (const std::string& file : mismatched) std::cout << ' ' << file;
    std::cout << '\n';
    return kExitRuntime;
  }
  std::cout << "match\n";
  return kExitOk;
}

}  // namespace hal::cli
