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

#include "idg/strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "idg/errors.h"
#include "idg/random.h"
#include "session.h"

namespace idg {

StrategyKind ParseStrategyKind(std::string_view name) {
  if (name == "random") return StrategyKind::kRandom;
  if (name == "noisy_shapley") return StrategyKind::kNoisyShapley;
  if (name == "shapley_commit") return StrategyKind::kShapleyCommit;
  if (name == "budget_ucb") return StrategyKind::kBudgetUcb;
  throw ArgumentError("unknown strategy kind: " + std::string(name));
}

UnqueriedPolicy ParseUnqueriedPolicy(std::string_view name) {
  if (name == "exclude") return UnqueriedPolicy::kExclude;
  if (name == "zero_center") return UnqueriedPolicy::kZeroCenter;
  throw ArgumentError("unknown unqueried policy: " + std::string(name));
}

RewardMode ParseRewardMode(std::string_view name) {
  if (name == "utility_delta") return RewardMode::kUtilityDelta;
  if (name == "label_agreement") return RewardMode::kLabelAgreement;
  throw ArgumentError("unknown reward mode: " + std::string(name));
}

std::string_view ToString(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kNoisyShapley: return "noisy_shapley";
    case StrategyKind::kShapleyCommit: return "shapley_commit";
    case StrategyKind::kBudgetUcb: return "budget_ucb";
  }
  return "random";
}

std::string_view ToString(UnqueriedPolicy policy) {
  return policy == UnqueriedPolicy::kExclude ? "exclude" : "zero_center";
}

std::string_view ToString(RewardMode mode) {
  return mode == RewardMode::kUtilityDelta ? "utility_delta" : "label_agreement";
}

void StrategyConfig::Validate() const {
  if (!(fraction > 0 && fraction <= 1)) {
    throw ArgumentError("fraction must lie in (0, 1]");
  }
  if (!(stability_eps > 0)) throw ArgumentError("stability_eps must be positive");
  if (!(exploration_c >= 0) || !std::isfinite(exploration_c)) {
    throw ArgumentError("exploration_c must be a finite non-negative number");
  }
  if (!(learning_rate > 0 && learning_rate <= 1)) {
    throw ArgumentError("learning_rate must lie in (0, 1]");
  }
  if (kind == StrategyKind::kShapleyCommit && bootstrap_iters < 1) {
    throw ArgumentError("bootstrap_iters must be at least 1");
  }
}

std::size_t SubsetSize(std::size_t n, double fraction) {
  if (!(fraction > 0 && fraction <= 1)) {
    throw ArgumentError("fraction must lie in (0, 1]");
  }
  const double raw = fraction * static_cast<double>(n);
  auto size = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::min(size, n);
}

std::vector<std::size_t> SelectRandomSubset(std::size_t n, double fraction,
                                            std::uint64_t seed) {
  const std::size_t m = SubsetSize(n, fraction);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kRandomSubset)}));
  rng.Shuffle(all);
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::size_t> TopFraction(std::span<const double> values,
                                     std::span<const PointId> ids,
                                     double fraction) {
  if (values.size() != ids.size()) {
    throw ArgumentError("values and ids differ in length");
  }
  const std::size_t m = SubsetSize(values.size(), fraction);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return ids[a] < ids[b];
  });
  order.resize(m);
  return order;
}

std::vector<PointId> NoisyShapleySelect(const TrainView& centers,
                                        const Dataset& eval_set, std::size_t k,
                                        double fraction) {
  if (centers.active_count() != centers.data().size()) {
    throw ArgumentError("every training point needs a center before ranking");
  }
  const ValuationVector vals = ExactKnnShapley(centers, eval_set, k);
  const auto top = TopFraction(vals.values, vals.ids, fraction);
  std::vector<PointId> out;
  out.reserve(top.size());
  for (std::size_t i : top) out.push_back(vals.ids[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Bandit

BanditState::BanditState(std::span<const PointId> arm_ids)
    : arms(arm_ids.begin(), arm_ids.end()),
      q(arm_ids.size(), 0.0),
      n(arm_ids.size(), 0) {}

std::size_t BanditState::IndexOf(PointId arm) const {
  const auto it = std::find(arms.begin(), arms.end(), arm);
  if (it == arms.end()) {
    throw ArgumentError("unknown arm " + std::to_string(arm));
  }
  return static_cast<std::size_t>(it - arms.begin());
}

std::vector<double> UcbScores(const BanditState& state,
                              const BudgetLedger& ledger,
                              const StrategyConfig& config) {
  std::vector<double> scores(state.arms.size());
  for (std::size_t i = 0; i < state.arms.size(); ++i) {
    const PointId a = state.arms[i];
    if (!ledger.CanCharge(a)) {
      scores[i] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const double bonus =
        std::sqrt(1.0 / (static_cast<double>(state.n[i]) + config.stability_eps));
    scores[i] = state.q[i] +
                config.exploration_c * bonus * ledger.RemainingFraction(a);
  }
  return scores;
}

std::optional<std::size_t> ArgmaxArm(std::span<const double> scores,
                                     std::span<const PointId> arms) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == -std::numeric_limits<double>::infinity()) continue;
    if (!best || scores[i] > scores[*best] ||
        (scores[i] == scores[*best] && arms[i] < arms[*best])) {
      best = i;
    }
  }
  return best;
}

void BanditUpdate(BanditState& state, PointId arm, double reward,
                  const StrategyConfig& config) {
  const std::size_t i = state.IndexOf(arm);
  state.q[i] += config.learning_rate * (reward - state.q[i]);
  ++state.n[i];
}

namespace {

// Share of the min(k, m) nearest other active centers carrying the label of
// `row`, where m is the number of other active rows. 0 when m is 0.
double CenterAgreement(const internal::GameSession& s,
                       const KnnEvaluator& evaluator, std::size_t row,
                       std::size_t k, DistanceMetric metric) {
  const Dataset& train = s.train();
  const auto& self = s.centers().Center(train.id(row));
  struct Other {
    double dist;
    PointId id;
    Label label;
  };
  // Unqueried active rows sit at the origin.
  const std::vector<double> zero(train.dim(), 0.0);
  std::vector<Other> others;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (i == row || !evaluator.active(i)) continue;
    const PointId id = train.id(i);
    const auto& c = s.centers().Contains(id) ? s.centers().Center(id) : zero;
    others.push_back({Distance(self, c, metric), id, train.label(i)});
  }
  if (others.empty()) return 0.0;
  const std::size_t m = std::min(k, others.size());
  std::partial_sort(others.begin(), others.begin() + m, others.end(),
                    [](const Other& a, const Other& b) {
                      return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
                    });
  std::size_t match = 0;
  for (std::size_t i = 0; i < m; ++i) match += others[i].label == train.label(row);
  return static_cast<double>(match) / static_cast<double>(m);
}

}  // namespace

RunResult RunBudgetUcb(const DatasetSplit& split, const DUPolicy& policy,
                       const StrategyConfig& config, const KnnOptions& knn,
                       std::uint64_t seed) {
  policy.Validate();
  return RunBudgetUcbWithLedger(
      split, policy, config, knn, seed,
      BudgetLedger(split.train.ids(), policy.charge_per_query, policy.b_max()));
}

RunResult RunBudgetUcbWithLedger(const DatasetSplit& split,
                                 const DUPolicy& policy,
                                 const StrategyConfig& config,
                                 const KnnOptions& knn, std::uint64_t seed,
                                 BudgetLedger ledger) {
  config.Validate();
  if (knn.k < 1) throw ArgumentError("k must be at least 1");
  internal::ValidateSplit(split);
  internal::GameSession s(split, policy, knn, seed, std::move(ledger));
  KnnEvaluator& ev = s.evaluator();
  const Dataset& train = split.train;

  if (config.unqueried_policy == UnqueriedPolicy::kZeroCenter) {
    const std::vector<double> zero(train.dim(), 0.0);
    for (std::size_t i = 0; i < train.size(); ++i) {
      ev.SetPoint(i, zero);
      ev.SetActive(i, true);
    }
  }

  BanditState state(train.ids());
  RunTrace trace;
  trace.seed = seed;
  double u = ev.Accuracy();
  state.last_utility = u;
  trace.iterations.push_back({0, {}, u, 0.0});

  std::uint64_t t = 0;
  while (u < policy.u_target) {
    if (config.max_iterations != 0 && t >= config.max_iterations) break;
    const auto scores = UcbScores(state, s.ledger(), config);
    const auto pick = ArgmaxArm(scores, state.arms);
    if (!pick) break;
    const std::size_t row = *pick;
    const PointId arm = train.id(row);
    ++t;
    s.Query(row);
    if (!ev.active(row)) ev.SetActive(row, true);
    const double u_new = ev.Accuracy();
    const double reward =
        config.reward == RewardMode::kUtilityDelta
            ? u_new - u
            : CenterAgreement(s, ev, row, knn.k, knn.metric);
    BanditUpdate(state, arm, reward, config);
    u = u_new;
    state.last_utility = u;
    trace.iterations.push_back({t, {arm}, u, s.charge()});
  }
  trace.total_spend = s.ledger().TotalSpent();
  trace.final_utility = u;
  trace.success = u >= policy.u_target;

  std::vector<PointId> ranking(train.ids().begin(), train.ids().end());
  {
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (state.q[a] != state.q[b]) return state.q[a] > state.q[b];
      return train.id(a) < train.id(b);
    });
    for (std::size_t i = 0; i < order.size(); ++i) ranking[i] = train.id(order[i]);
  }
  return std::move(s).Finish(std::move(trace), std::move(state.q),
                             std::move(ranking));
}

}  // namespace idg
