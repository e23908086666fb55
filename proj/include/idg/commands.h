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

// The CLI subcommands as library calls. Each validates the configuration and
// loads the dataset before it creates any output, and writes every file
// atomically. Errors surface as exceptions; game failure is not an error.
//
// Output files (cell index c, seed s):
//   trace_c<c>_<s>.csv    t,utility,spend
//   ledger_c<c>_<s>.json  per-point spent and remaining budget
//   q_c<c>_<s>.csv        id,q (budget_ucb runs)
//   centers_c<c>_<s>.csv  denoised centers in train row order, when every
//                         training point was released at least once
//   curves.csv            x,y_mean,y_std,label per cell
//   summary.json          simulate: the single cell's GridResult array
//   grid_results.json     grid: all cells
//   grid.incomplete       present while a grid is running
//   values.csv            shapley: id,value,method
//   acquisition_curve.csv shapley: test accuracy per prefix fraction
//   metrics.csv           metrics: cell,seed,gini_spend,spearman_q_shapley
//                         (Q against exact Shapley of the original training
//                         rows, averaged over the validation set)

#ifndef IDG_COMMANDS_H_
#define IDG_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "idg/config.h"
#include "idg/dataset.h"

namespace idg {

struct CommandOptions {
  std::filesystem::path config;
  // Overrides config.output_dir.
  std::optional<std::filesystem::path> output;
  // Replaces config.seeds with this single seed.
  std::optional<std::uint64_t> seed_override;
  std::size_t threads = 1;
};

// Config file plus command-line overrides.
RunConfig LoadCommandConfig(const CommandOptions& options);

void CmdSimulate(const CommandOptions& options);
void CmdGrid(const CommandOptions& options);
void CmdShapley(const CommandOptions& options);
void CmdMetrics(const CommandOptions& options);
void CmdSynth(const SyntheticSpec& spec, const std::filesystem::path& output,
              DataFormat format);

}  // namespace idg

#endif  // IDG_COMMANDS_H_
