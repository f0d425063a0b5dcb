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


// halsim: generate datasets, run active-learning experiments and sweeps,
// inspect snapshots and replay earlier runs.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

namespace {

void AddCommonOptions(CLI::App* command, hal::cli::CommonOptions& options,
                      bool needs_out) {
  command->add_option("--config", options.config_path,
                      "Config file of 'key = value' lines")
      ->check(CLI::ExistingFile);
  command->add_option("--scale", options.scale, "Preset sizes: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  command->add_option("--set", options.overrides,
                      "Override one config key (key=value); repeatable")
      ->take_all();
  command->add_option("--seed", options.seed, "Root RNG seed");
  command->add_option("--workers", options.workers,
                      "Threads used for repetitions")
      ->check(CLI::PositiveNumber);
  auto* out = command->add_option("--out", options.out_dir, "Output directory");
  if (needs_out) out->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid active learning simulator"};
  app.require_subcommand(1);

  hal::cli::CommonOptions options;
  std::string skews = "0.005,0.01,0.05,0.1,0.5";
  std::string p_range = "0.0:1.0:0.1";
  std::string scheme = "random";
  std::string path;
  std::string replay_out;

  auto* gen = app.add_subcommand("gen-data", "Write a dataset snapshot CSV");
  AddCommonOptions(gen, options, true);

  auto* run = app.add_subcommand("run", "Run the configured samplers");
  AddCommonOptions(run, options, true);

  auto* sweep_skew =
      app.add_subcommand("sweep-skew", "Run the experiment at several skews");
  AddCommonOptions(sweep_skew, options, true);
  sweep_skew->add_option("--skews", skews, "Skews: list a,b,c or start:stop:step")
      ->capture_default_str();

  auto* sweep_p = app.add_subcommand(
      "sweep-p", "Run one sampler per trade-off value p");
  AddCommonOptions(sweep_p, options, true);
  sweep_p->add_option("--p", p_range, "Values of p: start:stop:step or a list")
      ->capture_default_str();
  sweep_p->add_option("--scheme", scheme, "Exploration: random, gaussian, neighborhood")
      ->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Validate and summarize a snapshot");
  inspect->add_option("snapshot", path, "Snapshot CSV")->required();

  auto* replay = app.add_subcommand(
      "replay", "Re-run a manifest and compare every output byte for byte");
  replay->add_option("manifest", path, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out,
                     "Keep the replayed outputs here (default: scratch dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hal::cli::kExitConfig;
  }

  if (*gen) return hal::cli::GenData(options);
  if (*run) return hal::cli::Run(options);
  if (*sweep_skew) return hal::cli::SweepSkew(options, skews);
  if (*sweep_p) return hal::cli::SweepP(options, p_range, scheme);
  if (*inspect) return hal::cli::Inspect(path);
  if (*replay) return hal::cli::Replay(path, replay_out);
  return hal::cli::kExitConfig;
}
