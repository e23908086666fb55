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

#include "idg/commands.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "idg/errors.h"
#include "idg/game.h"
#include "idg/io.h"
#include "idg/knn.h"
#include "idg/metrics.h"
#include "idg/random.h"
#include "json.hpp"

namespace idg {
namespace {

namespace fs = std::filesystem;

std::string RunName(std::string_view prefix, std::size_t cell,
                    std::uint64_t seed, std::string_view ext) {
  return std::string(prefix) + "_c" + std::to_string(cell) + "_" +
         std::to_string(seed) + std::string(ext);
}

std::string QValuesCsv(const Dataset& train, const std::vector<double>& q) {
  std::string out = "id,q\n";
  for (std::size_t i = 0; i < q.size(); ++i) {
    out += std::to_string(train.id(i));
    out += ',';
    out += FormatDouble(q[i]);
    out += '\n';
  }
  return out;
}

// Centers in train row order, or nullopt when some point was never released.
std::optional<Dataset> CentersInRowOrder(const RunResult& run,
                                         const Dataset& train) {
  std::vector<double> features;
  features.reserve(train.size() * train.dim());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!run.centers.Contains(train.id(i))) return std::nullopt;
    const auto& c = run.centers.Center(train.id(i));
    features.insert(features.end(), c.begin(), c.end());
  }
  return Dataset(train.dim(), std::move(features), train.labels());
}

struct Prepared {
  RunConfig config;
  DatasetSplit split;
};

Prepared Prepare(const CommandOptions& options) {
  Prepared p;
  p.config = LoadCommandConfig(options);
  const Dataset data = LoadConfiguredDataset(p.config);
  p.split = MakeSplit(p.config, data);
  if (p.split.train.empty() || p.split.validation.empty()) {
    throw ArgumentError("train and validation splits must be non-empty");
  }
  return p;
}

// Runs every (policy, strategy, seed) combination and writes per-run files,
// curves.csv and the results JSON under `results_name`.
void RunCells(const Prepared& p, std::span<const PolicySpec> policy_specs,
              std::span<const StrategyConfig> strategies, std::size_t threads,
              const fs::path& out, const std::string& results_name) {
  std::vector<DUPolicy> policies;
  for (const auto& spec : policy_specs) {
    policies.push_back(ResolvePolicy(spec, p.split, p.config.knn));
  }
  const auto& seeds = p.config.seeds;
  const std::size_t cells = policies.size() * strategies.size();
  std::vector<RunTrace> traces(cells * seeds.size());
  std::mutex mu;

  GridOptions options;
  options.knn = p.config.knn;
  options.threads = threads;
  options.on_run = [&](std::size_t cell, std::uint64_t seed, const RunResult& run) {
    WriteFileAtomic(out / RunName("trace", cell, seed, ".csv"), run.trace.ToCsv());
    WriteFileAtomic(out / RunName("ledger", cell, seed, ".json"),
                    run.ledger.ToJson());
    if (!run.q_values.empty()) {
      WriteFileAtomic(out / RunName("q", cell, seed, ".csv"),
                      QValuesCsv(p.split.train, run.q_values));
    }
    if (auto centers = CentersInRowOrder(run, p.split.train)) {
      WriteFileAtomic(out / RunName("centers", cell, seed, ".csv"),
                      EncodeCsv(*centers));
    }
    // Duplicate seeds write identical files; keep the first slot filled.
    const std::size_t slot =
        cell * seeds.size() +
        static_cast<std::size_t>(std::find(seeds.begin(), seeds.end(), seed) -
                                 seeds.begin());
    std::lock_guard<std::mutex> lock(mu);
    traces[slot] = run.trace;
  };

  const auto results = GridSearch(p.split, policies, strategies, seeds, options);

  std::vector<CurveSeries> curves;
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<RunTrace> cell_traces;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t first = static_cast<std::size_t>(
          std::find(seeds.begin(), seeds.end(), seeds[s]) - seeds.begin());
      cell_traces.push_back(traces[c * seeds.size() + first]);
    }
    curves.push_back(AggregateCurves(cell_traces, "c" + std::to_string(c)));
  }
  ExportCurves(curves, out / "curves.csv");
  WriteFileAtomic(out / results_name, GridResultsToJson(results));
}

fs::path OutputDir(const RunConfig& config) {
  fs::create_directories(config.output_dir);
  return config.output_dir;
}

}  // namespace

RunConfig LoadCommandConfig(const CommandOptions& options) {
  RunConfig config = LoadRunConfig(options.config);
  if (options.output) config.output_dir = *options.output;
  if (options.seed_override) config.seeds = {*options.seed_override};
  return config;
}

void CmdSimulate(const CommandOptions& options) {
  const Prepared p = Prepare(options);
  const std::vector<PolicySpec> policy = {p.config.du_policy};
  const std::vector<StrategyConfig> strategy = {p.config.strategy};
  const fs::path out = OutputDir(p.config);
  RunCells(p, policy, strategy, options.threads, out, "summary.json");
}

void CmdGrid(const CommandOptions& options) {
  const Prepared p = Prepare(options);
  const fs::path out = OutputDir(p.config);
  const fs::path marker = out / "grid.incomplete";
  WriteFileAtomic(marker, "");
  RunCells(p, p.config.du_grid, p.config.strategy_grid, options.threads, out,
           "grid_results.json");
  fs::remove(marker);
}

void CmdShapley(const CommandOptions& options) {
  const Prepared p = Prepare(options);
  const RunConfig& config = p.config;
  if (p.split.test.empty()) {
    throw ArgumentError("the acquisition curve needs a non-empty test split");
  }
  Dataset valued = p.split.train;
  if (config.shapley.centers_from) {
    const Dataset centers = LoadDataset(*config.shapley.centers_from,
                                        DataFormat::kCsv);
    if (centers.size() != valued.size() || centers.dim() != valued.dim() ||
        centers.labels() != valued.labels()) {
      throw ArgumentError("centers file does not align with the training split");
    }
    valued = Dataset(valued.dim(), centers.features(), valued.labels(),
                     valued.ids());
  }
  const ValuationVector values = ExactKnnShapley(
      TrainView(valued, config.knn.metric), p.split.validation, config.knn.k);

  const std::size_t n = valued.size();
  const std::size_t orders = config.shapley.random_orders;
  std::vector<std::vector<double>> random_values(orders);
  for (std::size_t r = 0; r < orders; ++r) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(DeriveSeed(config.seeds.front(),
                       {static_cast<std::uint64_t>(Stream::kAcquisitionOrder), r}));
    rng.Shuffle(perm);
    random_values[r].resize(n);
    // Earlier in the permutation means a higher rank.
    for (std::size_t pos = 0; pos < n; ++pos) {
      random_values[r][perm[pos]] = static_cast<double>(n - pos);
    }
  }

  CurveSeries shapley_curve, random_curve;
  shapley_curve.label = "shapley";
  random_curve.label = "random";
  for (double f : config.shapley.fractions) {
    shapley_curve.x.push_back(f);
    shapley_curve.y_mean.push_back(
        PrefixAccuracy(valued, values.values, p.split.test, f, config.knn));
    shapley_curve.y_std.push_back(0.0);

    std::vector<double> acc;
    for (const auto& rv : random_values) {
      acc.push_back(PrefixAccuracy(valued, rv, p.split.test, f, config.knn));
    }
    const double mean =
        std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
    double sq = 0;
    for (double a : acc) sq += (a - mean) * (a - mean);
    random_curve.x.push_back(f);
    random_curve.y_mean.push_back(mean);
    random_curve.y_std.push_back(std::sqrt(sq / static_cast<double>(acc.size())));
  }

  const fs::path out = OutputDir(config);
  WriteFileAtomic(out / "values.csv", values.ToCsv());
  const std::vector<CurveSeries> curves = {shapley_curve, random_curve};
  ExportCurves(curves, out / "acquisition_curve.csv");
}

void CmdMetrics(const CommandOptions& options) {
  const Prepared p = Prepare(options);
  const fs::path dir = p.config.output_dir;
  if (!fs::is_directory(dir)) {
    throw IoError("output directory " + dir.string() + " does not exist");
  }

  const std::regex ledger_re(R"(ledger_c(\d+)_(\d+)\.json)");
  std::map<std::pair<std::size_t, std::uint64_t>, fs::path> ledgers;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, ledger_re)) {
      ledgers[{std::stoull(m[1]), std::stoull(m[2])}] = entry.path();
    }
  }
  if (ledgers.empty()) throw IoError("no ledger files in " + dir.string());

  std::vector<double> shapley;
  const auto exact = [&]() -> const std::vector<double>& {
    if (shapley.empty()) {
      shapley = ExactKnnShapley(TrainView(p.split.train, p.config.knn.metric),
                                p.split.validation, p.config.knn.k)
                    .values;
    }
    return shapley;
  };

  std::string csv = "cell,seed,gini_spend,spearman_q_shapley\n";
  for (const auto& [key, path] : ledgers) {
    std::vector<double> spent;
    try {
      const auto arr = nlohmann::json::parse(ReadFile(path));
      for (const auto& e : arr) spent.push_back(e.at("spent").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), 0);
    }
    std::string gini = "";
    try {
      gini = FormatDouble(Gini(spent));
    } catch (const UndefinedMetricError&) {
    }

    std::string rho = "";
    const fs::path q_path = dir / RunName("q", key.first, key.second, ".csv");
    if (fs::exists(q_path)) {
      std::map<PointId, double> q_by_id;
      const std::string text = ReadFile(q_path);
      std::size_t pos = text.find('\n');
      while (pos != std::string::npos && pos + 1 < text.size()) {
        const std::size_t end = text.find('\n', pos + 1);
        const std::string line = text.substr(pos + 1, end - pos - 1);
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(q_path.string(), 0);
        q_by_id[static_cast<PointId>(std::stoul(line.substr(0, comma)))] =
            std::stod(line.substr(comma + 1));
        pos = end;
      }
      std::vector<double> q;
      for (std::size_t i = 0; i < p.split.train.size(); ++i) {
        const auto it = q_by_id.find(p.split.train.id(i));
        if (it == q_by_id.end()) {
          throw ArgumentError(q_path.string() + " does not match the training split");
        }
        q.push_back(it->second);
      }
      try {
        rho = FormatDouble(Spearman(q, exact()));
      } catch (const UndefinedMetricError&) {
      }
    }
    csv += std::to_string(key.first) + "," + std::to_string(key.second) + "," +
           gini + "," + rho + "\n";
  }
  WriteFileAtomic(dir / "metrics.csv", csv);
}

void CmdSynth(const SyntheticSpec& spec, const fs::path& output,
              DataFormat format) {
  const Dataset data = GenerateSynthetic(spec);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  SaveDataset(data, output, format);
}

}  // namespace idg
