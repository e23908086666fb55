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

#include <filesystem>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "idg/commands.h"
#include "idg/errors.h"
#include "idg/game.h"
#include "json.hpp"
#include "oracles.h"

namespace idg {
namespace {

namespace fs = std::filesystem;

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = oracle::ScratchDir(::testing::UnitTest::GetInstance()->current_test_info()->name());
  }

  fs::path WriteConfig(const std::string& body) {
    const fs::path path = dir_ / "run.json";
    std::ofstream(path) << body;
    return path;
  }

  CommandOptions Options(const fs::path& config, const std::string& out) {
    CommandOptions o;
    o.config = config;
    o.output = dir_ / out;
    return o;
  }

  static std::vector<std::string> Listing(const fs::path& d) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(d)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
  }

  fs::path dir_;
};

const char* kGridConfig = R"({
  "dataset": {"synthetic": {"n": 120, "label_noise": 0.1, "seed": 2}},
  "split": {"train_n": 60, "val_n": 30, "test_n": 30, "seed": 2},
  "du_policy": {"t_max": 4, "u_target": "full_data"},
  "strategy": {"kind": "budget_ucb", "exploration_c": 2},
  "seeds": [0, 1],
  "grid": {"du_policy": {"b_max": [2, 4]}, "strategy": {"exploration_c": [0, 2]}},
  "shapley": {"fractions": [0.5, 1.0], "random_orders": 4}
})";

TEST_F(CommandsTest, SimulateWritesEveryArtifact) {
  const auto cfg = WriteConfig(R"({
    "dataset": {"synthetic": {"n": 120, "seed": 2}},
    "split": {"train_n": 60, "val_n": 30, "test_n": 30},
    "du_policy": {"t_max": 30, "u_target": 0.5},
    "strategy": {"kind": "random", "fraction": 1.0},
    "seeds": [3]
  })");
  CmdSimulate(Options(cfg, "sim"));
  const auto names = Listing(dir_ / "sim");
  for (const char* want : {"trace_c0_3.csv", "ledger_c0_3.json", "centers_c0_3.csv",
                           "curves.csv", "summary.json"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
  const auto summary = GridResultsFromJson(oracle::Slurp(dir_ / "sim" / "summary.json"));
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].seeds, 1u);
}

TEST_F(CommandsTest, MissingDatasetFailsWithoutOutput) {
  const auto cfg = WriteConfig(R"({
    "dataset": {"path": "absent.csv"},
    "split": {"train_n": 6, "val_n": 2, "test_n": 2}
  })");
  EXPECT_THROW(CmdSimulate(Options(cfg, "none")), IoError);
  EXPECT_THROW(CmdGrid(Options(cfg, "none")), IoError);
  EXPECT_FALSE(fs::exists(dir_ / "none"));
}

TEST_F(CommandsTest, BadConfigFailsWithoutOutput) {
  const auto cfg = WriteConfig(R"({"dataset": {"synthetic": {}}, "split": {"train_n": 1}, "k": 0})");
  EXPECT_THROW(CmdGrid(Options(cfg, "none")), ArgumentError);
  EXPECT_FALSE(fs::exists(dir_ / "none"));
}

TEST_F(CommandsTest, GridIsByteDeterministicAndThreadIndependent) {
  const auto cfg = WriteConfig(kGridConfig);
  CmdGrid(Options(cfg, "a"));
  auto b = Options(cfg, "b");
  b.threads = 3;
  CmdGrid(b);
  const auto names = Listing(dir_ / "a");
  EXPECT_EQ(names, Listing(dir_ / "b"));
  EXPECT_EQ(std::count(names.begin(), names.end(), "grid.incomplete"), 0);
  EXPECT_EQ(std::count_if(names.begin(), names.end(),
                          [](const std::string& n) { return n.rfind("q_c", 0) == 0; }),
            8);
  for (const auto& n : names) {
    EXPECT_EQ(oracle::Slurp(dir_ / "a" / n), oracle::Slurp(dir_ / "b" / n)) << n;
  }
  const auto grid = GridResultsFromJson(oracle::Slurp(dir_ / "a" / "grid_results.json"));
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[3].b_max(), 4.0);
  EXPECT_EQ(grid[3].exploration_c(), 2.0);
}

TEST_F(CommandsTest, OneCellGridEqualsSimulate) {
  const auto cfg = WriteConfig(R"({
    "dataset": {"synthetic": {"n": 120, "seed": 5}},
    "split": {"train_n": 60, "val_n": 30, "test_n": 30},
    "du_policy": {"t_max": 5, "u_target": 0.99},
    "strategy": {"kind": "noisy_shapley", "fraction": 0.5},
    "seeds": [1, 2]
  })");
  CmdSimulate(Options(cfg, "sim"));
  CmdGrid(Options(cfg, "grid"));
  EXPECT_EQ(oracle::Slurp(dir_ / "sim" / "summary.json"),
            oracle::Slurp(dir_ / "grid" / "grid_results.json"));
  EXPECT_EQ(oracle::Slurp(dir_ / "sim" / "trace_c0_2.csv"),
            oracle::Slurp(dir_ / "grid" / "trace_c0_2.csv"));
}

TEST_F(CommandsTest, SeedOverrideRunsOneSeed) {
  const auto cfg = WriteConfig(kGridConfig);
  auto o = Options(cfg, "one");
  o.seed_override = 9;
  CmdSimulate(o);
  EXPECT_TRUE(fs::exists(dir_ / "one" / "trace_c0_9.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "one" / "trace_c0_0.csv"));
}

TEST_F(CommandsTest, ShapleyValuesMatchLibrary) {
  const auto cfg = WriteConfig(kGridConfig);
  CmdShapley(Options(cfg, "sh"));
  const RunConfig c = LoadRunConfig(cfg);
  const auto split = MakeSplit(c, LoadConfiguredDataset(c));
  EXPECT_EQ(oracle::Slurp(dir_ / "sh" / "values.csv"),
            ExactKnnShapley(TrainView(split.train), split.validation, 5).ToCsv());
  const std::string curve = oracle::Slurp(dir_ / "sh" / "acquisition_curve.csv");
  EXPECT_EQ(std::count(curve.begin(), curve.end(), '\n'), 5);
}

TEST_F(CommandsTest, ShapleyOnCentersFromSimulation) {
  const auto cfg = WriteConfig(R"({
    "dataset": {"synthetic": {"n": 120, "seed": 2}},
    "split": {"train_n": 60, "val_n": 30, "test_n": 30},
    "du_policy": {"t_max": 3, "u_target": 2},
    "strategy": {"kind": "random"},
    "seeds": [0],
    "shapley": {"target": {"centers_from": "sim/centers_c0_0.csv"}}
  })");
  CmdSimulate(Options(cfg, "sim"));
  CmdShapley(Options(cfg, "sh"));
  EXPECT_TRUE(fs::exists(dir_ / "sh" / "values.csv"));
}

TEST_F(CommandsTest, MetricsMatchGrid) {
  const auto cfg = WriteConfig(kGridConfig);
  CmdGrid(Options(cfg, "g"));
  CmdMetrics(Options(cfg, "g"));
  const auto grid = GridResultsFromJson(oracle::Slurp(dir_ / "g" / "grid_results.json"));
  std::ifstream in(dir_ / "g" / "metrics.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cell,seed,gini_spend,spearman_q_shapley");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream ss(line);
    std::string cell, seed, gini;
    std::getline(ss, cell, ',');
    std::getline(ss, seed, ',');
    std::getline(ss, gini, ',');
    const auto& run = grid[std::stoul(cell)].runs[std::stoul(seed)];
    if (gini.empty()) {
      EXPECT_TRUE(std::isnan(run.gini_spend));
    } else {
      EXPECT_NEAR(std::stod(gini), run.gini_spend, 1e-12);
    }
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_THROW(CmdMetrics(Options(cfg, "empty_dir")), IoError);
}

TEST_F(CommandsTest, SynthWritesBothFormats) {
  SyntheticSpec spec;
  spec.n = 40;
  CmdSynth(spec, dir_ / "s.bin", DataFormat::kBinary);
  CmdSynth(spec, dir_ / "s.csv", DataFormat::kCsv);
  EXPECT_EQ(LoadDataset(dir_ / "s.bin", DataFormat::kBinary), GenerateSynthetic(spec));
  EXPECT_EQ(LoadDataset(dir_ / "s.csv", DataFormat::kCsv), GenerateSynthetic(spec));
}

}  // namespace
}  // namespace idg
