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

// Data Consumer acquisition policies.
//
// Ranking strategies (random, noisy_shapley, shapley_commit) decide each
// iteration which points to query and which points the classifier uses.
// The budget-aware UCB strategy treats every training point as an arm and
// pulls one arm per iteration.

#ifndef IDG_STRATEGIES_H_
#define IDG_STRATEGIES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "idg/dataset.h"
#include "idg/knn.h"
#include "idg/policy.h"
#include "idg/release.h"

namespace idg {

enum class StrategyKind { kRandom, kNoisyShapley, kShapleyCommit, kBudgetUcb };
enum class UnqueriedPolicy { kExclude, kZeroCenter };
enum class RewardMode { kUtilityDelta, kLabelAgreement };

StrategyKind ParseStrategyKind(std::string_view name);
UnqueriedPolicy ParseUnqueriedPolicy(std::string_view name);
RewardMode ParseRewardMode(std::string_view name);
std::string_view ToString(StrategyKind kind);
std::string_view ToString(UnqueriedPolicy policy);
std::string_view ToString(RewardMode mode);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kRandom;
  // Share of the training set used by the ranking strategies.
  double fraction = 1.0;
  // shapley_commit: all-point iterations before the ranking is frozen.
  std::uint64_t bootstrap_iters = 1;
  // UCB exploration coefficient c.
  double exploration_c = 1.0;
  // UCB learning rate alpha.
  double learning_rate = 0.1;
  // UCB denominator offset.
  double stability_eps = 1e-6;
  UnqueriedPolicy unqueried_policy = UnqueriedPolicy::kExclude;
  RewardMode reward = RewardMode::kUtilityDelta;
  // noisy_shapley: keep querying every point after the first iteration.
  bool refine_all = true;
  // UCB: global cap on arm pulls; 0 leaves only the per-point budgets.
  std::uint64_t max_iterations = 0;

  void Validate() const;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

// ceil(fraction * n), guarded against representation error (0.6 * 10).
std::size_t SubsetSize(std::size_t n, double fraction);

// ceil(fraction * n) distinct indices from [0, n), ascending; uniform
// without replacement and a pure function of the seed.
std::vector<std::size_t> SelectRandomSubset(std::size_t n, double fraction,
                                            std::uint64_t seed);

// Indices of the top ceil(fraction * n) values; equal values go to the lower
// id. Returned in rank order.
std::vector<std::size_t> TopFraction(std::span<const double> values,
                                     std::span<const PointId> ids,
                                     double fraction);

// Exact kNN Shapley on the centers, then the top fraction of ids. Every row of
// `centers` must be active (all points queried at least once).
std::vector<PointId> NoisyShapleySelect(const TrainView& centers,
                                        const Dataset& eval_set, std::size_t k,
                                        double fraction);

struct BanditState {
  std::vector<PointId> arms;
  std::vector<double> q;
  std::vector<std::uint64_t> n;
  double last_utility = 0;

  explicit BanditState(std::span<const PointId> arm_ids);
  // Position of `arm` in `arms`; throws ArgumentError when unknown.
  std::size_t IndexOf(PointId arm) const;
};

// Q(a) + c sqrt(1 / (N(a) + stability_eps)) * remaining(a) / max for arms the
// ledger can still charge, -infinity otherwise. Arm order follows state.arms.
std::vector<double> UcbScores(const BanditState& state,
                              const BudgetLedger& ledger,
                              const StrategyConfig& config);

// Index of the highest score, lowest arm id on ties; nullopt when every score
// is -infinity.
std::optional<std::size_t> ArgmaxArm(std::span<const double> scores,
                                     std::span<const PointId> arms);

// Q(a) += alpha (reward - Q(a)); N(a) += 1.
void BanditUpdate(BanditState& state, PointId arm, double reward,
                  const StrategyConfig& config);

// Budget-aware UCB data selection, one arm pull per iteration. Ends when the
// utility reaches policy.u_target, every arm is exhausted, or
// config.max_iterations pulls have been made. The trace starts with a t = 0
// record of the utility before any pull.
RunResult RunBudgetUcb(const DatasetSplit& split, const DUPolicy& policy,
                       const StrategyConfig& config, const KnnOptions& knn,
                       std::uint64_t seed);

// Same with a caller-provided ledger (for caps that are not a multiple of the
// per-query charge).
RunResult RunBudgetUcbWithLedger(const DatasetSplit& split,
                                 const DUPolicy& policy,
                                 const StrategyConfig& config,
                                 const KnnOptions& knn, std::uint64_t seed,
                                 BudgetLedger ledger);

}  // namespace idg

#endif  // IDG_STRATEGIES_H_
