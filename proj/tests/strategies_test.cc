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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "idg/errors.h"
#include "idg/game.h"
#include "idg/strategies.h"

namespace idg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

DatasetSplit SmallSplit(std::uint64_t seed, double noise = 0.0) {
  SyntheticSpec spec;
  spec.n = 120;
  spec.label_noise = noise;
  spec.seed = seed;
  return SplitDataset(GenerateSynthetic(spec), 60, 30, 30, seed);
}

TEST(ParseTest, NamesRoundTrip) {
  for (auto k : {StrategyKind::kRandom, StrategyKind::kNoisyShapley,
                 StrategyKind::kShapleyCommit, StrategyKind::kBudgetUcb}) {
    EXPECT_EQ(ParseStrategyKind(ToString(k)), k);
  }
  EXPECT_EQ(ParseUnqueriedPolicy("zero_center"), UnqueriedPolicy::kZeroCenter);
  EXPECT_EQ(ParseRewardMode("label_agreement"), RewardMode::kLabelAgreement);
  EXPECT_THROW(ParseStrategyKind("greedy"), ArgumentError);
}

TEST(ConfigTest, Validation) {
  StrategyConfig c;
  EXPECT_NO_THROW(c.Validate());
  for (double f : {0.0, -0.1, 1.5}) {
    c.fraction = f;
    EXPECT_THROW(c.Validate(), ArgumentError);
  }
  c = {};
  c.stability_eps = 0;
  EXPECT_THROW(c.Validate(), ArgumentError);
  c = {};
  c.exploration_c = -1;
  EXPECT_THROW(c.Validate(), ArgumentError);
  c = {};
  c.learning_rate = 0;
  EXPECT_THROW(c.Validate(), ArgumentError);
  c = {};
  c.kind = StrategyKind::kShapleyCommit;
  c.bootstrap_iters = 0;
  EXPECT_THROW(c.Validate(), ArgumentError);
}

TEST(SubsetTest, SizesAndDeterminism) {
  EXPECT_EQ(SubsetSize(10, 0.25), 3u);
  EXPECT_EQ(SubsetSize(10, 0.6), 6u);
  EXPECT_EQ(SubsetSize(7, 1.0), 7u);
  EXPECT_EQ(SelectRandomSubset(10, 1.0, 3).size(), 10u);
  const auto a = SelectRandomSubset(100, 0.3, 5);
  EXPECT_EQ(a, SelectRandomSubset(100, 0.3, 5));
  EXPECT_EQ(a.size(), 30u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 30u);
}

TEST(SubsetTest, RoughlyUniform) {
  std::vector<int> hits(20);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    for (auto i : SelectRandomSubset(20, 0.25, s)) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 120);
}

TEST(TopFractionTest, TiesGoToLowerId) {
  const std::vector<double> v{0.1, 0.5, 0.5, 0.9};
  const std::vector<PointId> ids{0, 7, 3, 1};
  EXPECT_EQ(TopFraction(v, ids, 0.5), (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(TopFraction(v, ids, 1.0).size(), 4u);
}

TEST(NoisyShapleyTest, ZeroNoiseReducesToExact) {
  const auto split = SmallSplit(1, 0.2);
  const auto sel = NoisyShapleySelect(TrainView(split.train), split.validation, 5, 0.4);
  const auto exact = ExactKnnShapley(TrainView(split.train), split.validation, 5);
  const auto top = TopFraction(exact.values, exact.ids, 0.4);
  ASSERT_EQ(sel.size(), top.size());
  for (std::size_t i = 0; i < top.size(); ++i) EXPECT_EQ(sel[i], split.train.id(top[i]));
}

TEST(NoisyShapleyTest, IdenticalPointsStraddlingCutoff) {
  const Dataset train(1, {0, 0, 5}, {1, 1, 0}, {4, 2, 0});
  const Dataset eval(1, {0.1}, {1});
  EXPECT_EQ(NoisyShapleySelect(TrainView(train), eval, 1, 0.3),
            (std::vector<PointId>{2}));
}

TEST(UcbTest, ScoreExamples) {
  const std::vector<PointId> ids{0, 1};
  BanditState st(ids);
  st.q = {0.5, 0.2};
  st.n = {3, 0};
  const BudgetLedger ledger(ids, 1.0, 10.0);
  StrategyConfig cfg;
  cfg.exploration_c = 2;
  const auto s = UcbScores(st, ledger, cfg);
  EXPECT_NEAR(s[0], 0.5 + 2 * std::sqrt(1 / 3.000001), 1e-12);
  EXPECT_NEAR(s[0], 1.65470, 1e-5);
  cfg.exploration_c = 0;
  EXPECT_EQ(UcbScores(st, ledger, cfg), st.q);
}

TEST(UcbTest, ExhaustedArmIsNeverChosen) {
  const std::vector<PointId> ids{0, 1};
  BanditState st(ids);
  st.q = {5.0, -5.0};
  BudgetLedger ledger(ids, 1.0, 1.0);
  ledger.Charge(0);
  StrategyConfig cfg;
  const auto s = UcbScores(st, ledger, cfg);
  EXPECT_EQ(s[0], kNegInf);
  EXPECT_EQ(ArgmaxArm(s, ids), std::optional<std::size_t>(1));
  ledger.Charge(1);
  EXPECT_FALSE(ArgmaxArm(UcbScores(st, ledger, cfg), ids).has_value());
}

TEST(UcbTest, ScoreFallsAsBudgetIsSpent) {
  const std::vector<PointId> ids{0};
  BanditState st(ids);
  st.q = {0.3};
  st.n = {2};
  StrategyConfig cfg;
  cfg.exploration_c = 1.5;
  BudgetLedger ledger(ids, 1.0, 6.0);
  double prev = UcbScores(st, ledger, cfg)[0];
  for (int i = 0; i < 5; ++i) {
    ledger.Charge(0);
    const double now = UcbScores(st, ledger, cfg)[0];
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(UcbTest, ArgmaxTiesAndShiftInvariance) {
  const std::vector<PointId> ids{9, 4, 6};
  EXPECT_EQ(ArgmaxArm(std::vector<double>{1, 2, 2}, ids), std::optional<std::size_t>(1));
  EXPECT_EQ(ArgmaxArm(std::vector<double>{3, 3, 3}, ids), std::optional<std::size_t>(1));
  BanditState st(ids);
  st.q = {0.1, 0.7, 0.4};
  BudgetLedger ledger(ids, 1.0, 5.0);
  StrategyConfig cfg;
  cfg.exploration_c = 0;
  const auto base = ArgmaxArm(UcbScores(st, ledger, cfg), ids);
  for (double shift : {-3.0, 0.25, 100.0}) {
    BanditState moved = st;
    for (auto& q : moved.q) q += shift;
    EXPECT_EQ(ArgmaxArm(UcbScores(moved, ledger, cfg), ids), base);
  }
}

TEST(UcbTest, UpdateExamplesAndGeometricConvergence) {
  const std::vector<PointId> ids{0};
  StrategyConfig cfg;
  BanditState st(ids);
  cfg.learning_rate = 1;
  BanditUpdate(st, 0, 0.7, cfg);
  EXPECT_EQ(st.q[0], 0.7);
  EXPECT_EQ(st.n[0], 1u);
  st.q[0] = 0.4;
  cfg.learning_rate = 0.1;
  BanditUpdate(st, 0, 0.9, cfg);
  EXPECT_NEAR(st.q[0], 0.45, 1e-15);
  st.q[0] = -2;
  for (int i = 0; i < 100; ++i) BanditUpdate(st, 0, 1.0, cfg);
  EXPECT_LE(std::abs(st.q[0] - 1.0), std::pow(0.9, 100) * 3.0 + 1e-15);
  EXPECT_THROW(BanditUpdate(st, 5, 1.0, cfg), ArgumentError);
}

TEST(RunUcbTest, ZeroTargetStopsBeforeAnyPull) {
  const auto split = SmallSplit(2);
  DUPolicy p;
  p.u_target = 0;
  StrategyConfig cfg;
  cfg.kind = StrategyKind::kBudgetUcb;
  const auto r = RunBudgetUcb(split, p, cfg, {}, 1);
  EXPECT_TRUE(r.trace.success);
  EXPECT_EQ(r.trace.total_spend, 0.0);
  ASSERT_EQ(r.trace.iterations.size(), 1u);
  EXPECT_EQ(r.trace.iterations[0].t, 0u);
}

TEST(RunUcbTest, StarvedWhenCapBelowCharge) {
  const auto split = SmallSplit(2);
  DUPolicy p;
  p.charge_per_query = 2;
  StrategyConfig cfg;
  cfg.kind = StrategyKind::kBudgetUcb;
  const auto r = RunBudgetUcbWithLedger(split, p, cfg, {}, 1,
                                        BudgetLedger(split.train.ids(), 2.0, 1.0));
  EXPECT_FALSE(r.trace.success);
  EXPECT_EQ(r.trace.total_spend, 0.0);
  EXPECT_EQ(r.trace.IterationsRun(), 0u);
}

TEST(RunUcbTest, PullCountsMatchSpend) {
  const auto split = SmallSplit(3, 0.1);
  DUPolicy p;
  p.t_max = 3;
  p.charge_per_query = 0.5;
  p.u_target = 1.01;
  for (auto policy : {UnqueriedPolicy::kExclude, UnqueriedPolicy::kZeroCenter}) {
    for (auto reward : {RewardMode::kUtilityDelta, RewardMode::kLabelAgreement}) {
      StrategyConfig cfg;
      cfg.kind = StrategyKind::kBudgetUcb;
      cfg.exploration_c = 2;
      cfg.unqueried_policy = policy;
      cfg.reward = reward;
      const auto r = RunBudgetUcb(split, p, cfg, {}, 4);
      std::vector<std::uint64_t> pulls(split.train.size());
      for (const auto& it : r.trace.iterations) {
        for (PointId a : it.selected) ++pulls[split.train.IndexOf(a)];
      }
      for (std::size_t i = 0; i < pulls.size(); ++i) {
        EXPECT_EQ(0.5 * static_cast<double>(pulls[i]), r.ledger.Spent(split.train.id(i)));
        EXPECT_EQ(pulls[i], 3u);
      }
      EXPECT_FALSE(r.trace.success);
      EXPECT_EQ(r.trace.total_spend, r.ledger.TotalSpent());
      EXPECT_EQ(r.q_values.size(), split.train.size());
      EXPECT_EQ(r.final_selection.size(), split.train.size());
    }
  }
}

TEST(RunUcbTest, IterationCap) {
  const auto split = SmallSplit(3);
  DUPolicy p;
  p.u_target = 1.01;
  StrategyConfig cfg;
  cfg.kind = StrategyKind::kBudgetUcb;
  cfg.max_iterations = 7;
  const auto r = RunBudgetUcb(split, p, cfg, {}, 4);
  EXPECT_EQ(r.trace.IterationsRun(), 7u);
  EXPECT_EQ(r.trace.total_spend, 7.0);
}

TEST(RunUcbTest, ExplorationEvensSpend) {
  double gini[2] = {0, 0};
  const double cs[2] = {0, 2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto split = SmallSplit(seed, 0.2);
    DUPolicy p;
    p.t_max = 50;
    p.u_target = FullDataUtility(split, {});
    for (int i = 0; i < 2; ++i) {
      StrategyConfig cfg;
      cfg.kind = StrategyKind::kBudgetUcb;
      cfg.exploration_c = cs[i];
      const auto r = RunBudgetUcb(split, p, cfg, {}, seed);
      gini[i] += SummarizeRun(r, seed, {}).gini_spend / 10;
    }
  }
  EXPECT_LT(gini[1], gini[0]);
}

}  // namespace
}  // namespace idg
