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

// JSON run configuration.
//
//   {
//     "dataset": {"path": "data.csv", "format": "csv"}
//              | {"synthetic": {"n": 500, "d": 4, "num_classes": 2,
//                               "cluster_spread": 0.5, "label_noise": 0.2,
//                               "seed": 7}},
//     "split": {"train_n": 300, "val_n": 100, "test_n": 100, "seed": 1},
//     "k": 5, "distance": "l2",
//     "du_policy": {"charge_per_query": 1, "t_max": 100,
//                   "eps_per_feature": 1, "u_target": 0.8 | "full_data"},
//     "strategy": {"kind": "budget_ucb", "exploration_c": 2, ...},
//     "seeds": [1, 2, 3],
//     "output_dir": "out",
//     "grid": {"du_policy": {"b_max": [10, 20, 50]},
//              "strategy": {"exploration_c": [0, 2]}},
//     "shapley": {"target": "originals" | {"centers_from": "c.csv"},
//                 "fractions": [0.1, 0.2], "random_orders": 10}
//   }
//
// Unknown keys are rejected. Relative paths resolve against the config file's
// directory. "b_max" may stand in for "t_max" in du_policy objects and grids;
// it must be a whole multiple of charge_per_query.

#ifndef IDG_CONFIG_H_
#define IDG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idg/dataset.h"
#include "idg/policy.h"
#include "idg/strategies.h"

namespace idg {

struct DatasetSource {
  std::optional<std::filesystem::path> path;
  DataFormat format = DataFormat::kCsv;
  std::optional<SyntheticSpec> synthetic;
};

struct SplitSpec {
  std::size_t train_n = 0;
  std::size_t val_n = 0;
  std::size_t test_n = 0;
  std::uint64_t seed = 0;
};

struct ShapleySpec {
  // Value the original training rows, or the rows of a dataset file aligned
  // with the training split (same size and labels, row for row).
  std::optional<std::filesystem::path> centers_from;
  std::vector<double> fractions = {0.1, 0.2, 0.3, 0.4, 0.5,
                                   0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t random_orders = 10;
};

struct PolicySpec {
  DUPolicy policy;
  // u_target was "full_data": replaced by FullDataUtility at run time.
  bool full_data_target = false;
};

struct RunConfig {
  DatasetSource dataset;
  SplitSpec split;
  KnnOptions knn;
  PolicySpec du_policy;
  StrategyConfig strategy;
  std::vector<std::uint64_t> seeds = {0};
  std::filesystem::path output_dir = "out";
  // Cartesian product of the "grid" sweeps over the base du_policy and
  // strategy; a single entry each when there is no grid block.
  std::vector<PolicySpec> du_grid;
  std::vector<StrategyConfig> strategy_grid;
  ShapleySpec shapley;
};

// Throws ArgumentError for invalid content and ParseError for malformed JSON.
RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);

Dataset LoadConfiguredDataset(const RunConfig& config);
DatasetSplit MakeSplit(const RunConfig& config, const Dataset& data);

// The policy with a "full_data" target filled in.
DUPolicy ResolvePolicy(const PolicySpec& spec, const DatasetSplit& split,
                       const KnnOptions& knn);

}  // namespace idg

#endif  // IDG_CONFIG_H_
