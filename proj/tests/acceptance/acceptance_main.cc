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

// Acceptance suite. Each criterion prints one PASS or FAIL line; the exit
// status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "idg/commands.h"
#include "idg/denoiser.h"
#include "idg/game.h"
#include "idg/io.h"
#include "idg/knn.h"
#include "idg/random.h"
#include "idg/release.h"
#include "oracles.h"

namespace idg {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

constexpr std::uint64_t kSeeds = 10;

// Synthetic benchmark for the game criteria: one dataset and split per seed.
DatasetSplit Benchmark(std::uint64_t seed, double label_noise) {
  SyntheticSpec spec;
  spec.n = 500;
  spec.d = 4;
  spec.num_classes = 2;
  spec.cluster_spread = 0.5;
  spec.label_noise = label_noise;
  spec.seed = seed;
  return SplitDataset(GenerateSynthetic(spec), 300, 100, 100, seed);
}

Outcome ShapleyExactness() {
  const auto start = Clock::now();
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<std::size_t> size(4, 8);
  double worst = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = size(gen);
    const std::size_t k = inst % 2 == 0 ? 1 : 3;
    const Dataset train = oracle::RandomDataset(n, 3, 2, gen);
    const Dataset eval = oracle::RandomDataset(3, 3, 2, gen);
    for (std::size_t e = 0; e < eval.size(); ++e) {
      const std::vector<std::size_t> row{e};
      MonteCarloOptions opts;
      opts.exhaustive = true;
      opts.value = ValueFunction::kSoftVote;
      const auto mc = MonteCarloShapley(TrainView(train), eval.Subset(row), k, opts);
      const auto exact =
          ExactKnnShapleyForQuery(TrainView(train), eval.row(e), eval.label(e), k);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(mc.values[i] - exact[i]));
      }
    }
  }
  const double secs = Seconds(start);
  return {worst <= 1e-9 && secs < 60,
          Fmt("max |exact - exhaustive| = %.3g over 50 instances, %.2f s", worst, secs)};
}

Outcome Efficiency() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  std::uniform_int_distribution<std::size_t> kd(1, 8);
  double worst = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const Dataset train = oracle::RandomDataset(size(gen), 3, 3, gen);
    const Dataset eval = oracle::RandomDataset(5, 3, 3, gen);
    const std::size_t k = kd(gen);
    for (std::size_t e = 0; e < eval.size(); ++e) {
      const auto v = ExactKnnShapleyForQuery(TrainView(train), eval.row(e), eval.label(e), k);
      const double full = SoftVoteValue(TrainView(train), eval.row(e), eval.label(e), k);
      worst = std::max(worst, std::abs(std::accumulate(v.begin(), v.end(), 0.0) - full));
    }
  }
  return {worst <= 1e-9, Fmt("max |sum - v(train)| = %.3g over 100 instances", worst)};
}

Outcome LaplaceStatistics() {
  const auto start = Clock::now();
  const ReleaseConfig cfg{1.0, FeatureBounds{{0.0}, {1.0}}};
  const std::vector<double> x{0.5};
  const int n = 100000;
  std::vector<double> e(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(ReleaseSeed(1, 0, static_cast<std::uint64_t>(i) + 1));
    e[i] = NoisyRelease(x, cfg, rng)[0] - 0.5;
  }
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
  double var = 0, mad = 0;
  for (double v : e) {
    var += (v - mean) * (v - mean) / n;
    mad += std::abs(v) / n;
  }
  const double secs = Seconds(start);
  return {std::abs(var - 2) <= 0.1 && std::abs(mad - 1) <= 0.05 && secs < 10,
          Fmt("variance %.4f (want 2 +-5%%), MAD %.4f (want 1 +-5%%), %.2f s", var, mad, secs)};
}

Outcome DenoisingRate() {
  SyntheticSpec spec;
  spec.n = 20;
  spec.seed = 5;
  const Dataset points = GenerateSynthetic(spec);
  const double eps = 1.0;
  const ReleaseConfig cfg{eps, ComputeFeatureBounds(points)};
  double per_release = 0;
  for (std::size_t j = 0; j < points.dim(); ++j) {
    const double b = cfg.bounds.sensitivity(j) / eps;
    per_release += 2 * b * b;
  }
  const std::vector<std::uint64_t> checkpoints{1, 2, 4, 8, 16, 32, 64, 100};
  std::vector<double> fidelity(checkpoints.size(), 0.0);
  double mse16 = 0;
  const std::size_t seeds = 200;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    CenterTable table(points.dim());
    std::size_t next = 0;
    for (std::uint64_t t = 1; t <= checkpoints.back(); ++t) {
      for (std::size_t i = 0; i < points.size(); ++i) {
        Rng rng(ReleaseSeed(s, points.id(i), t));
        table.Update(points.id(i), NoisyRelease(points.row(i), cfg, rng));
      }
      if (t != checkpoints[next]) continue;
      fidelity[next++] += CenterFidelity(table, points) / seeds;
      if (t == 16) {
        for (std::size_t i = 0; i < points.size(); ++i) {
          const auto& c = table.Center(points.id(i));
          for (std::size_t j = 0; j < points.dim(); ++j) {
            const double d = c[j] - points.row(i)[j];
            mse16 += d * d / static_cast<double>(seeds * points.size());
          }
        }
      }
    }
  }
  const double expected = per_release / 16;
  bool monotone = true;
  for (std::size_t i = 1; i < fidelity.size(); ++i) monotone &= fidelity[i] <= fidelity[i - 1];
  std::string curve;
  for (double f : fidelity) curve += Fmt(" %.3f", f);
  return {std::abs(mse16 - expected) <= 0.1 * expected && monotone,
          Fmt("MSE at t=16 %.4f vs %.4f; fidelity curve", mse16, expected) + curve};
}

Outcome ShapleyBeatsRandom() {
  const auto start = Clock::now();
  KnnOptions knn;
  double shapley_acc = 0, random_acc = 0;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const auto split = Benchmark(s, 0.2);
    const auto values = ExactKnnShapley(TrainView(split.train), split.validation, knn.k);
    shapley_acc += PrefixAccuracy(split.train, values.values, split.test, 0.4, knn) / kSeeds;
    const std::size_t n = split.train.size();
    const std::size_t orders = 10;
    for (std::size_t r = 0; r < orders; ++r) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      Rng rng(DeriveSeed(s, {static_cast<std::uint64_t>(Stream::kAcquisitionOrder), r}));
      rng.Shuffle(perm);
      std::vector<double> rank(n);
      for (std::size_t pos = 0; pos < n; ++pos) rank[perm[pos]] = static_cast<double>(n - pos);
      random_acc += PrefixAccuracy(split.train, rank, split.test, 0.4, knn) /
                    static_cast<double>(kSeeds * orders);
    }
  }
  const double gap = 100 * (shapley_acc - random_acc);
  const double secs = Seconds(start);
  return {gap >= 2.0 && secs < 300,
          Fmt("top-40%% Shapley %.4f vs random %.4f (+%.2f points), %.1f s", shapley_acc,
              random_acc, gap, secs)};
}

struct RankingStats {
  double success_rate = 0;
  double mean_iterations = 0;
};

// Heavy-noise benchmark runs with the target at noise-free full-data accuracy.
RankingStats RunRankingBenchmark(const StrategyConfig& strategy) {
  RankingStats st;
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const auto split = Benchmark(s, 0.0);
    DUPolicy p;
    p.eps_per_feature = 0.25;
    p.t_max = 100;
    p.u_target = FullDataUtility(split, {});
    const auto r = RunIdg(split, p, strategy, {}, s);
    st.success_rate += r.trace.success ? 1.0 / kSeeds : 0.0;
    st.mean_iterations += static_cast<double>(r.trace.IterationsRun()) / kSeeds;
  }
  return st;
}

StrategyConfig Ranking(StrategyKind kind, double fraction, std::uint64_t bootstrap = 1) {
  StrategyConfig s;
  s.kind = kind;
  s.fraction = fraction;
  s.bootstrap_iters = bootstrap;
  return s;
}

Outcome RandomFailure(std::map<std::string, RankingStats>& cache) {
  std::string detail;
  bool pass = true;
  for (double f : {0.2, 0.4, 0.6}) {
    const auto st = RunRankingBenchmark(Ranking(StrategyKind::kRandom, f));
    pass &= st.success_rate <= 0.2;
    detail += Fmt("random@%.1f success %.1f; ", f, st.success_rate);
  }
  const auto full = RunRankingBenchmark(Ranking(StrategyKind::kRandom, 1.0));
  const auto ns = RunRankingBenchmark(Ranking(StrategyKind::kNoisyShapley, 0.6));
  cache["noisy_shapley"] = ns;
  pass &= ns.mean_iterations < full.mean_iterations;
  detail += Fmt("noisy_shapley@0.6 %.1f iterations vs random@1.0 %.1f", ns.mean_iterations,
                full.mean_iterations);
  return {pass, detail};
}

Outcome CommitNeutrality(std::map<std::string, RankingStats>& cache) {
  if (!cache.contains("noisy_shapley")) {
    cache["noisy_shapley"] = RunRankingBenchmark(Ranking(StrategyKind::kNoisyShapley, 0.6));
  }
  const double base = cache["noisy_shapley"].mean_iterations;
  bool pass = true;
  std::string detail = Fmt("noisy_shapley %.1f iterations;", base);
  for (std::uint64_t commit : {5, 10, 25}) {
    const auto st = RunRankingBenchmark(Ranking(StrategyKind::kShapleyCommit, 0.6, commit));
    pass &= st.mean_iterations >= 0.9 * base;
    detail += Fmt(" commit@%llu %.1f", static_cast<unsigned long long>(commit), st.mean_iterations);
  }
  return {pass, detail};
}

// b_max x c UCB grid, merged across the per-seed datasets.
std::vector<GridResult> UcbGrid() {
  std::vector<DUPolicy> du;
  for (std::uint64_t b : {10, 20, 50}) {
    DUPolicy p;
    p.t_max = b;
    p.eps_per_feature = 1.0;
    du.push_back(p);
  }
  std::vector<StrategyConfig> st;
  for (double c : {0.0, 2.0}) {
    StrategyConfig s;
    s.kind = StrategyKind::kBudgetUcb;
    s.exploration_c = c;
    st.push_back(s);
  }
  std::vector<std::vector<SeedOutcome>> runs(du.size() * st.size());
  std::vector<DUPolicy> resolved(du.size());
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const auto split = Benchmark(s, 0.0);
    auto grid = du;
    for (auto& p : grid) p.u_target = FullDataUtility(split, {});
    const std::vector<std::uint64_t> seed{s};
    for (const auto& cell : GridSearch(split, grid, st, seed)) {
      runs[cell.cell].push_back(cell.runs[0]);
    }
    resolved = grid;
  }
  std::vector<GridResult> merged;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    merged.push_back(AggregateCell(i, resolved[i / st.size()], st[i % st.size()], runs[i]));
  }
  return merged;
}

const GridResult& At(const std::vector<GridResult>& g, double b, double c) {
  for (const auto& r : g) {
    if (r.b_max() == b && r.exploration_c() == c) return r;
  }
  throw std::logic_error("missing grid cell");
}

Outcome UcbBudgetThreshold(const std::vector<GridResult>& g) {
  bool pass = true;
  std::string detail;
  for (double c : {0.0, 2.0}) {
    pass &= At(g, 50, c).success_rate > At(g, 10, c).success_rate;
    detail += Fmt("c=%g:", c);
    for (double b : {10.0, 20.0, 50.0}) detail += Fmt(" %.1f", At(g, b, c).success_rate);
    detail += "; ";
  }
  for (double b : {10.0, 20.0, 50.0}) {
    pass &= At(g, b, 0).success_rate <= At(g, b, 2).success_rate;
  }
  return {pass, "success rate by b_max " + detail};
}

Outcome ExplorationEvensSpend(const std::vector<GridResult>& g) {
  const double g0 = At(g, 50, 0).gini_spend, g2 = At(g, 50, 2).gini_spend;
  return {g2 < g0, Fmt("Gini at b_max=50: c=2 %.4f vs c=0 %.4f", g2, g0)};
}

Outcome QShapleyTrend(const std::vector<GridResult>& g) {
  auto mean_rho = [&](double b) {
    double sum = 0;
    int count = 0;
    for (double c : {0.0, 2.0}) {
      const double r = At(g, b, c).spearman_q_shapley;
      if (!std::isnan(r)) {
        sum += r;
        ++count;
      }
    }
    return count ? sum / count : std::nan("");
  };
  const double r10 = mean_rho(10), r50 = mean_rho(50);
  return {r50 >= r10 && r10 < 0.9 && r50 < 0.9,
          Fmt("mean Spearman(Q, Shapley) b_max=10 %.4f, b_max=50 %.4f", r10, r50)};
}

Outcome PricingOptimality() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> price(0.5, 5.0);
  int matches = 0;
  for (int inst = 0; inst < 30; ++inst) {
    SyntheticSpec spec;
    spec.n = 40;
    spec.label_noise = 0.1;
    spec.seed = 1000 + inst;
    const auto split = SplitDataset(GenerateSynthetic(spec), 10, 30, 0, spec.seed);
    std::vector<double> prices(10);
    for (auto& p : prices) p = std::round(price(gen) * 4) / 4;
    auto utility = [&](std::span<const std::size_t> rows) {
      if (rows.empty()) return 0.0;
      std::vector<PointId> ids;
      for (auto r : rows) ids.push_back(split.train.id(r));
      return EvaluateUtility(TrainView(split.train, ids), split.validation, 3);
    };
    const double target = 0.6 + 0.03 * (inst % 10);
    const auto got = SolvePricingGame(prices, utility, target);
    const auto want = oracle::GrayCodePricing(
        prices, [&](const std::vector<std::size_t>& s) { return utility(s); }, target);
    matches += got.feasible == want.feasible && got.subset == want.subset &&
               got.cost == want.cost;
  }
  return {matches == 30, Fmt("%d/30 instances identical to the second enumeration", matches)};
}

Outcome Determinism() {
  const fs::path dir = oracle::ScratchDir("acceptance_determinism");
  const fs::path cfg = dir / "grid.json";
  WriteFileAtomic(cfg, R"({
  "dataset": {"synthetic": {"n": 500, "d": 4, "num_classes": 2, "cluster_spread": 0.5,
                            "label_noise": 0.2, "seed": 0}},
  "split": {"train_n": 300, "val_n": 100, "test_n": 100, "seed": 0},
  "k": 5,
  "du_policy": {"eps_per_feature": 1, "u_target": "full_data"},
  "strategy": {"kind": "budget_ucb"},
  "seeds": [0, 1, 2],
  "grid": {"du_policy": {"b_max": [10, 20, 50]}, "strategy": {"exploration_c": [0, 2]}}
})");
  std::vector<std::string> listing[2];
  for (int run = 0; run < 2; ++run) {
    CommandOptions o;
    o.config = cfg;
    o.output = dir / ("run" + std::to_string(run));
    o.threads = run == 0 ? 1 : 2;
    CmdGrid(o);
    for (const auto& e : fs::directory_iterator(*o.output)) {
      listing[run].push_back(e.path().filename().string());
    }
    std::sort(listing[run].begin(), listing[run].end());
  }
  std::size_t identical = 0;
  for (const auto& name : listing[0]) {
    identical += oracle::Slurp(dir / "run0" / name) == oracle::Slurp(dir / "run1" / name);
  }
  fs::remove_all(dir);
  const bool pass = listing[0] == listing[1] && identical == listing[0].size() && identical > 0;
  return {pass, Fmt("%zu/%zu files byte-identical", identical, listing[0].size())};
}

}  // namespace
}  // namespace idg

int main() {
  using idg::Outcome;
  std::map<std::string, idg::RankingStats> ranking_cache;
  std::vector<idg::GridResult> ucb;
  auto ucb_grid = [&]() -> const std::vector<idg::GridResult>& {
    if (ucb.empty()) ucb = idg::UcbGrid();
    return ucb;
  };
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"shapley_exactness", idg::ShapleyExactness},
      {"efficiency_axiom", idg::Efficiency},
      {"laplace_statistics", idg::LaplaceStatistics},
      {"denoising_rate", idg::DenoisingRate},
      {"shapley_beats_random", idg::ShapleyBeatsRandom},
      {"random_strategy_failure", [&] { return idg::RandomFailure(ranking_cache); }},
      {"commit_neutrality", [&] { return idg::CommitNeutrality(ranking_cache); }},
      {"ucb_budget_threshold", [&] { return idg::UcbBudgetThreshold(ucb_grid()); }},
      {"exploration_evens_spend", [&] { return idg::ExplorationEvensSpend(ucb_grid()); }},
      {"q_shapley_correlation_trend", [&] { return idg::QShapleyTrend(ucb_grid()); }},
      {"pricing_game_optimality", idg::PricingOptimality},
      {"determinism", idg::Determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
