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

// Game orchestration: the iterative disclosure loop, the grid search over DU
// policies and DC strategies, the DU's max-min objective and the
// complete-information pricing baseline.

#ifndef IDG_GAME_H_
#define IDG_GAME_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idg/dataset.h"
#include "idg/policy.h"
#include "idg/strategies.h"

namespace idg {

// One game. Ranking strategies run at most policy.t_max iterations and query
// each selected point once per iteration; budget_ucb pulls one arm per
// iteration until the target is met or no arm can be charged. Configuration
// errors are raised before any release.
RunResult RunIdg(const DatasetSplit& split, const DUPolicy& policy,
                 const StrategyConfig& strategy, const KnnOptions& knn,
                 std::uint64_t seed);

// Validation accuracy of the noise-free full training set.
double FullDataUtility(const DatasetSplit& split, const KnnOptions& knn);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool success = false;
  std::uint64_t iterations = 0;
  double total_spend = 0;
  double final_utility = 0;
  double gini_spend = 0;           // NaN when nothing was spent
  double spearman_q_shapley = 0;   // NaN for ranking strategies or ties
};

struct GridResult {
  std::size_t cell = 0;
  DUPolicy du_policy;
  StrategyConfig strategy;
  // Majority of seeds reached the target.
  bool success = false;
  double success_rate = 0;
  double total_spend = 0;          // mean over seeds
  double mean_iterations = 0;
  double gini_spend = 0;           // mean over seeds where defined, else NaN
  double spearman_q_shapley = 0;   // mean over seeds where defined, else NaN
  std::size_t seeds = 0;
  std::vector<SeedOutcome> runs;

  double b_max() const { return du_policy.b_max(); }
  double exploration_c() const { return strategy.exploration_c; }
};

struct GridOptions {
  KnnOptions knn;
  // Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 1;
  // Called once per finished run, possibly from several threads at once.
  std::function<void(std::size_t cell, std::uint64_t seed, const RunResult&)>
      on_run;
};

// Cells are the Cartesian product du_grid x strategy_grid, DU policy major.
// Each cell runs every seed. Results come back in cell order and do not depend
// on the thread count.
std::vector<GridResult> GridSearch(const DatasetSplit& split,
                                   std::span<const DUPolicy> du_grid,
                                   std::span<const StrategyConfig> strategy_grid,
                                   std::span<const std::uint64_t> seeds,
                                   const GridOptions& options = {});

// Folds per-seed outcomes into cell aggregates.
GridResult AggregateCell(std::size_t cell, const DUPolicy& policy,
                         const StrategyConfig& strategy,
                         std::vector<SeedOutcome> runs);

// Per-seed summary of a run; exact_shapley (train row order) feeds the
// Spearman comparison for UCB runs and may be empty.
SeedOutcome SummarizeRun(const RunResult& run, std::uint64_t seed,
                         std::span<const double> exact_shapley);

// JSON array of GridResult objects; NaN is written as null.
std::string GridResultsToJson(std::span<const GridResult> results);

// Inverse of GridResultsToJson; null reads back as NaN. Throws ParseError on
// malformed input.
std::vector<GridResult> GridResultsFromJson(std::string_view text);

// The DU policy whose worst case over the successful strategies in
// `strategy_space` spends the most. Policies with no successful strategy rank
// below all others; ties go to the smaller B_max, then to grid order.
// Throws ArgumentError on empty results or a missing (policy, strategy) pair.
DUPolicy DuObjective(std::span<const GridResult> results,
                     std::span<const StrategyConfig> strategy_space);

inline constexpr std::size_t kMaxPricingPoints = 12;

struct PricingSolution {
  bool feasible = false;
  std::vector<std::size_t> subset;  // ascending indices
  double cost = 0;
};

using SubsetUtility = std::function<double(std::span<const std::size_t>)>;

// Cheapest subset whose utility reaches u_target, by exhaustive search.
// Ties go to the smaller subset, then the lexicographically smaller one.
// Infeasible instances return feasible = false. Throws ArgumentError for more
// than kMaxPricingPoints prices or a non-positive price.
PricingSolution SolvePricingGame(std::span<const double> prices,
                                 const SubsetUtility& utility, double u_target);

// Accuracy on eval_set of the kNN built from the top ceil(fraction * n) rows
// of `train` ranked by `values` (train row order, ties to the lower id).
double PrefixAccuracy(const Dataset& train, std::span<const double> values,
                      const Dataset& eval_set, double fraction,
                      const KnnOptions& knn);

}  // namespace idg

#endif  // IDG_GAME_H_
