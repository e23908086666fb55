/*
 * Copyright 2026 The IDG Authors.
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

// idg: simulate, grid, shapley, synth and metrics subcommands.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "idg/commands.h"
#include "idg/dataset.h"

namespace {

std::size_t ThreadsFromEnv() {
  const char* env = std::getenv("IDG_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<std::size_t>(v) : 1;
  } catch (const std::exception&) {
    std::cerr << "idg: ignoring malformed IDG_THREADS=" << env << "\n";
    return 1;
  }
}

void AddRunFlags(CLI::App* cmd, idg::CommandOptions& opts,
                 std::optional<std::string>& output,
                 std::optional<std::uint64_t>& seed,
                 std::optional<std::size_t>& threads) {
  cmd->add_option("--config", opts.config, "Run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--output", output, "Output directory (overrides output_dir)");
  cmd->add_option("--seed-override", seed, "Run this single seed");
  cmd->add_option("--threads", threads, "Worker threads (default: $IDG_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information Disclosure Game simulator"};
  app.require_subcommand(1);

  idg::CommandOptions opts;
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;

  auto* simulate = app.add_subcommand("simulate", "Run the configured game per seed");
  auto* grid = app.add_subcommand("grid", "Run the configured policy x strategy grid");
  auto* shapley = app.add_subcommand("shapley", "Value training points and trace acquisition");
  auto* metrics = app.add_subcommand("metrics", "Recompute spend Gini and Spearman(Q, Shapley of originals) from run files");
  for (auto* cmd : {simulate, grid, shapley, metrics}) {
    AddRunFlags(cmd, opts, output, seed, threads);
  }

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  idg::SyntheticSpec spec;
  std::string synth_out;
  std::string format = "csv";
  synth->add_option("--output", synth_out, "Dataset file")->required();
  synth->add_option("--format", format, "csv or binary")
      ->check(CLI::IsMember({"csv", "binary"}));
  synth->add_option("--n", spec.n, "Number of points");
  synth->add_option("--d", spec.d, "Feature dimension");
  synth->add_option("--classes", spec.num_classes, "Number of classes");
  synth->add_option("--spread", spec.cluster_spread, "Cluster standard deviation");
  synth->add_option("--label-noise", spec.label_noise, "Label flip probability");
  synth->add_option("--seed", spec.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  if (output) opts.output = *output;
  opts.seed_override = seed;
  opts.threads = threads ? *threads : ThreadsFromEnv();

  try {
    if (simulate->parsed()) {
      idg::CmdSimulate(opts);
    } else if (grid->parsed()) {
      idg::CmdGrid(opts);
    } else if (shapley->parsed()) {
      idg::CmdShapley(opts);
    } else if (metrics->parsed()) {
      idg::CmdMetrics(opts);
    } else if (synth->parsed()) {
      idg::CmdSynth(spec, synth_out, idg::ParseDataFormat(format));
    }
  } catch (const std::exception& e) {
    std::cerr << "idg: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
