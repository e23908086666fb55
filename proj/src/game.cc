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

#include "idg/game.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "idg/errors.h"
#include "idg/metrics.h"
#include "json.hpp"
#include "session.h"

namespace idg {

void DUPolicy::Validate() const {
  if (!(charge_per_query > 0) || !std::isfinite(charge_per_query)) {
    throw ArgumentError("charge_per_query must be positive");
  }
  if (t_max < 1) throw ArgumentError("t_max must be at least 1");
  if (!(eps_per_feature > 0) || !std::isfinite(eps_per_feature)) {
    throw ArgumentError("eps_per_feature must be positive");
  }
  if (std::isnan(u_target)) throw ArgumentError("u_target is NaN");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

RunResult RunRanking(const DatasetSplit& split, const DUPolicy& policy,
                     const StrategyConfig& strategy, const KnnOptions& knn,
                     std::uint64_t seed) {
  const Dataset& train = split.train;
  const std::size_t n = train.size();
  internal::GameSession s(
      split, policy, knn, seed,
      BudgetLedger(train.ids(), policy.charge_per_query, policy.b_max()));
  KnnEvaluator& ev = s.evaluator();

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> active;  // M_t
  std::vector<std::size_t> committed;
  if (strategy.kind == StrategyKind::kRandom) {
    committed = SelectRandomSubset(n, strategy.fraction, seed);
  }

  RunTrace trace;
  trace.seed = seed;
  double u = 0;
  for (std::uint64_t t = 1; t <= policy.t_max; ++t) {
    const std::vector<std::size_t>* query = &all;
    bool rank = false;
    switch (strategy.kind) {
      case StrategyKind::kRandom:
        query = &committed;
        break;
      case StrategyKind::kNoisyShapley:
        if (t > 1 && !strategy.refine_all) query = &active;
        rank = true;
        break;
      case StrategyKind::kShapleyCommit:
        if (t > strategy.bootstrap_iters) {
          query = &committed;
        } else {
          rank = true;
        }
        break;
      case StrategyKind::kBudgetUcb:
        throw ArgumentError("budget_ucb is not a ranking strategy");
    }

    IterationRecord rec;
    rec.t = t;
    for (std::size_t row : *query) {
      if (!s.CanQuery(row)) continue;
      s.Query(row);
      rec.selected.push_back(train.id(row));
    }
    if (rank) {
      const auto values = ev.ExactShapley();
      active = TopFraction(values, train.ids(), strategy.fraction);
      std::sort(active.begin(), active.end());
      if (strategy.kind == StrategyKind::kShapleyCommit &&
          t == strategy.bootstrap_iters) {
        committed = active;
      }
    } else {
      active = *query;
    }
    ev.SetActiveRows(active);
    u = ev.Accuracy();
    rec.utility = u;
    rec.spend_this_iter =
        static_cast<double>(rec.selected.size()) * s.charge();
    trace.iterations.push_back(std::move(rec));
    if (u >= policy.u_target) {
      trace.success = true;
      break;
    }
  }
  trace.total_spend = s.ledger().TotalSpent();
  trace.final_utility = u;

  std::vector<PointId> selection;
  selection.reserve(active.size());
  for (std::size_t row : active) selection.push_back(train.id(row));
  return std::move(s).Finish(std::move(trace), {}, std::move(selection));
}

std::vector<double> ExactShapleyOnOriginals(const DatasetSplit& split,
                                            const KnnOptions& knn) {
  KnnEvaluator ev(split.validation, split.train.ids(), split.train.labels(),
                  knn.k, knn.metric);
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    ev.SetPoint(i, split.train.row(i));
  }
  return ev.ExactShapley();
}

double MeanDefined(const std::vector<SeedOutcome>& runs,
                   double SeedOutcome::*field) {
  double sum = 0;
  std::size_t count = 0;
  for (const auto& r : runs) {
    if (std::isnan(r.*field)) continue;
    sum += r.*field;
    ++count;
  }
  return count == 0 ? kNaN : sum / static_cast<double>(count);
}

nlohmann::ordered_json NumberOrNull(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

RunResult RunIdg(const DatasetSplit& split, const DUPolicy& policy,
                 const StrategyConfig& strategy, const KnnOptions& knn,
                 std::uint64_t seed) {
  policy.Validate();
  strategy.Validate();
  if (knn.k < 1) throw ArgumentError("k must be at least 1");
  internal::ValidateSplit(split);
  if (strategy.kind == StrategyKind::kBudgetUcb) {
    return RunBudgetUcb(split, policy, strategy, knn, seed);
  }
  return RunRanking(split, policy, strategy, knn, seed);
}

double FullDataUtility(const DatasetSplit& split, const KnnOptions& knn) {
  internal::ValidateSplit(split);
  return EvaluateUtility(TrainView(split.train, knn.metric), split.validation,
                         knn.k);
}

SeedOutcome SummarizeRun(const RunResult& run, std::uint64_t seed,
                         std::span<const double> exact_shapley) {
  SeedOutcome out;
  out.seed = seed;
  out.success = run.trace.success;
  out.iterations = run.trace.IterationsRun();
  out.total_spend = run.trace.total_spend;
  out.final_utility = run.trace.final_utility;
  try {
    out.gini_spend = Gini(run.ledger.SpentVector());
  } catch (const UndefinedMetricError&) {
    out.gini_spend = kNaN;
  }
  out.spearman_q_shapley = kNaN;
  if (!run.q_values.empty() && run.q_values.size() == exact_shapley.size()) {
    try {
      out.spearman_q_shapley = Spearman(run.q_values, exact_shapley);
    } catch (const UndefinedMetricError&) {
    }
  }
  return out;
}

GridResult AggregateCell(std::size_t cell, const DUPolicy& policy,
                         const StrategyConfig& strategy,
                         std::vector<SeedOutcome> runs) {
  if (runs.empty()) throw ArgumentError("a grid cell needs at least one seed");
  GridResult g;
  g.cell = cell;
  g.du_policy = policy;
  g.strategy = strategy;
  g.seeds = runs.size();
  const double count = static_cast<double>(runs.size());
  std::size_t wins = 0;
  double spend = 0, iters = 0;
  for (const auto& r : runs) {
    wins += r.success;
    spend += r.total_spend;
    iters += static_cast<double>(r.iterations);
  }
  g.success_rate = static_cast<double>(wins) / count;
  g.success = 2 * wins > runs.size();
  g.total_spend = spend / count;
  g.mean_iterations = iters / count;
  g.gini_spend = MeanDefined(runs, &SeedOutcome::gini_spend);
  g.spearman_q_shapley = MeanDefined(runs, &SeedOutcome::spearman_q_shapley);
  g.runs = std::move(runs);
  return g;
}

std::vector<GridResult> GridSearch(const DatasetSplit& split,
                                   std::span<const DUPolicy> du_grid,
                                   std::span<const StrategyConfig> strategy_grid,
                                   std::span<const std::uint64_t> seeds,
                                   const GridOptions& options) {
  if (du_grid.empty() || strategy_grid.empty()) {
    throw ArgumentError("grid search needs non-empty grids");
  }
  if (seeds.empty()) throw ArgumentError("grid search needs at least one seed");
  internal::ValidateSplit(split);
  if (options.knn.k < 1) throw ArgumentError("k must be at least 1");
  for (const auto& p : du_grid) p.Validate();
  for (const auto& s : strategy_grid) s.Validate();

  bool any_ucb = false;
  for (const auto& s : strategy_grid) any_ucb |= s.kind == StrategyKind::kBudgetUcb;
  const std::vector<double> shapley =
      any_ucb ? ExactShapleyOnOriginals(split, options.knn) : std::vector<double>{};

  const std::size_t cells = du_grid.size() * strategy_grid.size();
  const std::size_t tasks = cells * seeds.size();
  std::vector<SeedOutcome> outcomes(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      const std::size_t cell = task / seeds.size();
      const std::uint64_t seed = seeds[task % seeds.size()];
      const DUPolicy& policy = du_grid[cell / strategy_grid.size()];
      const StrategyConfig& strategy = strategy_grid[cell % strategy_grid.size()];
      try {
        const RunResult run = RunIdg(split, policy, strategy, options.knn, seed);
        outcomes[task] = SummarizeRun(run, seed, shapley);
        if (options.on_run) options.on_run(cell, seed, run);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(tasks);
      }
    }
  };

  std::size_t threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, tasks);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<GridResult> results;
  results.reserve(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<SeedOutcome> runs(outcomes.begin() + c * seeds.size(),
                                  outcomes.begin() + (c + 1) * seeds.size());
    results.push_back(AggregateCell(c, du_grid[c / strategy_grid.size()],
                                    strategy_grid[c % strategy_grid.size()],
                                    std::move(runs)));
  }
  return results;
}

std::string GridResultsToJson(std::span<const GridResult> results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& g : results) {
    nlohmann::ordered_json cell;
    cell["index"] = g.cell;
    cell["b_max"] = g.b_max();
    cell["exploration_c"] = g.exploration_c();
    cell["charge_per_query"] = g.du_policy.charge_per_query;
    cell["t_max"] = g.du_policy.t_max;
    cell["eps_per_feature"] = g.du_policy.eps_per_feature;
    cell["u_target"] = g.du_policy.u_target;
    cell["kind"] = ToString(g.strategy.kind);
    cell["fraction"] = g.strategy.fraction;
    cell["bootstrap_iters"] = g.strategy.bootstrap_iters;
    cell["learning_rate"] = g.strategy.learning_rate;
    cell["stability_eps"] = g.strategy.stability_eps;
    cell["unqueried_policy"] = ToString(g.strategy.unqueried_policy);
    cell["reward"] = ToString(g.strategy.reward);
    cell["refine_all"] = g.strategy.refine_all;
    cell["max_iterations"] = g.strategy.max_iterations;

    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& r : g.runs) {
      runs.push_back({{"seed", r.seed},
                      {"success", r.success},
                      {"iterations", r.iterations},
                      {"total_spend", r.total_spend},
                      {"final_utility", r.final_utility},
                      {"gini_spend", NumberOrNull(r.gini_spend)},
                      {"spearman_q_shapley", NumberOrNull(r.spearman_q_shapley)}});
    }
    nlohmann::ordered_json obj;
    obj["cell"] = std::move(cell);
    obj["success"] = g.success;
    obj["success_rate"] = g.success_rate;
    obj["total_spend"] = g.total_spend;
    obj["mean_iterations"] = g.mean_iterations;
    obj["gini_spend"] = NumberOrNull(g.gini_spend);
    obj["spearman_q_shapley"] = NumberOrNull(g.spearman_q_shapley);
    obj["seeds"] = g.seeds;
    obj["runs"] = std::move(runs);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

namespace {

double NumberOrNaN(const nlohmann::ordered_json& v) {
  return v.is_null() ? kNaN : v.get<double>();
}

}  // namespace

std::vector<GridResult> GridResultsFromJson(std::string_view text) {
  std::vector<GridResult> out;
  try {
    const auto arr = nlohmann::ordered_json::parse(text);
    if (!arr.is_array()) throw ParseError("grid results must be a JSON array", 0);
    for (const auto& obj : arr) {
      const auto& cell = obj.at("cell");
      GridResult g;
      g.cell = cell.at("index").get<std::size_t>();
      g.du_policy.charge_per_query = cell.at("charge_per_query").get<double>();
      g.du_policy.t_max = cell.at("t_max").get<std::uint64_t>();
      g.du_policy.eps_per_feature = cell.at("eps_per_feature").get<double>();
      g.du_policy.u_target = cell.at("u_target").get<double>();
      g.strategy.kind = ParseStrategyKind(cell.at("kind").get<std::string>());
      g.strategy.fraction = cell.at("fraction").get<double>();
      g.strategy.bootstrap_iters = cell.at("bootstrap_iters").get<std::uint64_t>();
      g.strategy.exploration_c = cell.at("exploration_c").get<double>();
      g.strategy.learning_rate = cell.at("learning_rate").get<double>();
      g.strategy.stability_eps = cell.at("stability_eps").get<double>();
      g.strategy.unqueried_policy =
          ParseUnqueriedPolicy(cell.at("unqueried_policy").get<std::string>());
      g.strategy.reward = ParseRewardMode(cell.at("reward").get<std::string>());
      g.strategy.refine_all = cell.at("refine_all").get<bool>();
      g.strategy.max_iterations = cell.at("max_iterations").get<std::uint64_t>();
      g.success = obj.at("success").get<bool>();
      g.success_rate = obj.at("success_rate").get<double>();
      g.total_spend = obj.at("total_spend").get<double>();
      g.mean_iterations = obj.at("mean_iterations").get<double>();
      g.gini_spend = NumberOrNaN(obj.at("gini_spend"));
      g.spearman_q_shapley = NumberOrNaN(obj.at("spearman_q_shapley"));
      g.seeds = obj.at("seeds").get<std::size_t>();
      for (const auto& r : obj.at("runs")) {
        SeedOutcome o;
        o.seed = r.at("seed").get<std::uint64_t>();
        o.success = r.at("success").get<bool>();
        o.iterations = r.at("iterations").get<std::uint64_t>();
        o.total_spend = r.at("total_spend").get<double>();
        o.final_utility = r.at("final_utility").get<double>();
        o.gini_spend = NumberOrNaN(r.at("gini_spend"));
        o.spearman_q_shapley = NumberOrNaN(r.at("spearman_q_shapley"));
        g.runs.push_back(o);
      }
      out.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("grid results: ") + e.what(), 0);
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("grid results: ") + e.what(), 0);
  }
  return out;
}

DUPolicy DuObjective(std::span<const GridResult> results,
                     std::span<const StrategyConfig> strategy_space) {
  if (results.empty()) throw ArgumentError("no grid results");
  if (strategy_space.empty()) throw ArgumentError("empty strategy space");

  std::vector<DUPolicy> policies;
  for (const auto& g : results) {
    if (std::find(policies.begin(), policies.end(), g.du_policy) == policies.end()) {
      policies.push_back(g.du_policy);
    }
  }

  bool have_best = false;
  DUPolicy best;
  bool best_feasible = false;
  double best_value = 0;
  for (const auto& p : policies) {
    bool feasible = false;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : strategy_space) {
      const auto it = std::find_if(results.begin(), results.end(),
                                   [&](const GridResult& g) {
                                     return g.du_policy == p && g.strategy == s;
                                   });
      if (it == results.end()) {
        throw ArgumentError("grid results miss a (policy, strategy) pair");
      }
      if (!it->success) continue;
      feasible = true;
      worst = std::min(worst, it->total_spend);
    }
    bool better;
    if (!have_best) {
      better = true;
    } else if (feasible != best_feasible) {
      better = feasible;
    } else if (feasible && worst != best_value) {
      better = worst > best_value;
    } else {
      better = p.b_max() < best.b_max();
    }
    if (better) {
      have_best = true;
      best = p;
      best_feasible = feasible;
      best_value = worst;
    }
  }
  return best;
}

PricingSolution SolvePricingGame(std::span<const double> prices,
                                 const SubsetUtility& utility, double u_target) {
  const std::size_t n = prices.size();
  if (n > kMaxPricingPoints) {
    throw ArgumentError("pricing game is limited to " +
                        std::to_string(kMaxPricingPoints) + " points");
  }
  for (double p : prices) {
    if (!(p > 0) || !std::isfinite(p)) throw ArgumentError("prices must be positive");
  }
  PricingSolution best;
  std::vector<std::size_t> subset;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    subset.clear();
    double cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        subset.push_back(i);
        cost += prices[i];
      }
    }
    if (best.feasible) {
      if (cost > best.cost) continue;
      if (cost == best.cost) {
        if (subset.size() > best.subset.size()) continue;
        if (subset.size() == best.subset.size() && !(subset < best.subset)) continue;
      }
    }
    if (utility(subset) >= u_target) {
      best.feasible = true;
      best.subset = subset;
      best.cost = cost;
    }
  }
  return best;
}

double PrefixAccuracy(const Dataset& train, std::span<const double> values,
                      const Dataset& eval_set, double fraction,
                      const KnnOptions& knn) {
  if (values.size() != train.size()) {
    throw ArgumentError("one value per training row is required");
  }
  const auto rows = TopFraction(values, train.ids(), fraction);
  std::vector<PointId> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) ids.push_back(train.id(r));
  return EvaluateUtility(TrainView(train, ids, knn.metric), eval_set, knn.k);
}

}  // namespace idg
