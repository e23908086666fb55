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

#include "idg/config.h"

#include <cmath>
#include <initializer_list>

#include "idg/errors.h"
#include "idg/game.h"
#include "idg/io.h"
#include "json.hpp"

namespace idg {
namespace {

using Json = nlohmann::ordered_json;

void CheckKeys(const Json& obj, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ArgumentError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok |= key == a;
    if (!ok) {
      throw ArgumentError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T Get(const Json& obj, const char* key, std::string_view where) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ArgumentError(std::string(where) + "." + key + " is missing or has the wrong type");
  }
}

template <typename T>
T GetOr(const Json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  return Get<T>(obj, key, where);
}

bool IsCount(const Json& v) {
  return v.is_number_unsigned() ||
         (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t GetCount(const Json& obj, const char* key, std::uint64_t fallback,
                       std::string_view where) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!IsCount(v)) {
    throw ArgumentError(std::string(where) + "." + key +
                        " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

PolicySpec ParsePolicy(const Json& obj) {
  constexpr std::string_view kWhere = "du_policy";
  CheckKeys(obj, kWhere,
            {"charge_per_query", "t_max", "b_max", "eps_per_feature", "u_target"});
  PolicySpec spec;
  DUPolicy& p = spec.policy;
  p.charge_per_query = GetOr<double>(obj, "charge_per_query", p.charge_per_query, kWhere);
  p.eps_per_feature = GetOr<double>(obj, "eps_per_feature", p.eps_per_feature, kWhere);
  if (obj.contains("t_max") && obj.contains("b_max")) {
    throw ArgumentError("du_policy sets both t_max and b_max");
  }
  p.t_max = GetCount(obj, "t_max", p.t_max, kWhere);
  if (obj.contains("b_max")) {
    const double b_max = Get<double>(obj, "b_max", kWhere);
    if (!(p.charge_per_query > 0)) {
      throw ArgumentError("charge_per_query must be positive");
    }
    const double ratio = b_max / p.charge_per_query;
    const double whole = std::round(ratio);
    if (!(whole >= 1) || std::abs(ratio - whole) > 1e-9 * std::max(1.0, whole)) {
      throw ArgumentError("b_max must be a positive multiple of charge_per_query");
    }
    p.t_max = static_cast<std::uint64_t>(whole);
  }
  if (obj.contains("u_target")) {
    const Json& u = obj.at("u_target");
    if (u.is_string()) {
      if (u.get<std::string>() != "full_data") {
        throw ArgumentError("du_policy.u_target must be a number or \"full_data\"");
      }
      spec.full_data_target = true;
    } else {
      p.u_target = Get<double>(obj, "u_target", kWhere);
    }
  }
  p.Validate();
  return spec;
}

StrategyConfig ParseStrategy(const Json& obj) {
  constexpr std::string_view kWhere = "strategy";
  CheckKeys(obj, kWhere,
            {"kind", "fraction", "bootstrap_iters", "exploration_c",
             "learning_rate", "stability_eps", "unqueried_policy", "reward",
             "refine_all", "max_iterations"});
  StrategyConfig s;
  if (obj.contains("kind")) s.kind = ParseStrategyKind(Get<std::string>(obj, "kind", kWhere));
  s.fraction = GetOr<double>(obj, "fraction", s.fraction, kWhere);
  s.bootstrap_iters = GetCount(obj, "bootstrap_iters", s.bootstrap_iters, kWhere);
  s.exploration_c = GetOr<double>(obj, "exploration_c", s.exploration_c, kWhere);
  s.learning_rate = GetOr<double>(obj, "learning_rate", s.learning_rate, kWhere);
  s.stability_eps = GetOr<double>(obj, "stability_eps", s.stability_eps, kWhere);
  if (obj.contains("unqueried_policy")) {
    s.unqueried_policy =
        ParseUnqueriedPolicy(Get<std::string>(obj, "unqueried_policy", kWhere));
  }
  if (obj.contains("reward")) {
    s.reward = ParseRewardMode(Get<std::string>(obj, "reward", kWhere));
  }
  s.refine_all = GetOr<bool>(obj, "refine_all", s.refine_all, kWhere);
  s.max_iterations = GetCount(obj, "max_iterations", s.max_iterations, kWhere);
  s.Validate();
  return s;
}

SyntheticSpec ParseSynthetic(const Json& obj) {
  constexpr std::string_view kWhere = "dataset.synthetic";
  CheckKeys(obj, kWhere,
            {"n", "d", "num_classes", "cluster_spread", "label_noise", "seed"});
  SyntheticSpec s;
  s.n = GetCount(obj, "n", s.n, kWhere);
  s.d = GetCount(obj, "d", s.d, kWhere);
  s.num_classes = GetCount(obj, "num_classes", s.num_classes, kWhere);
  s.cluster_spread = GetOr<double>(obj, "cluster_spread", s.cluster_spread, kWhere);
  s.label_noise = GetOr<double>(obj, "label_noise", s.label_noise, kWhere);
  s.seed = GetCount(obj, "seed", s.seed, kWhere);
  return s;
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

DataFormat InferFormat(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin" || ext == ".idgd") return DataFormat::kBinary;
  return DataFormat::kCsv;
}

// Cartesian product of the sweeps in `grid` applied to `base`; the first
// listed field varies slowest.
std::vector<Json> Expand(const Json& base, const Json& grid, std::string_view where) {
  std::vector<Json> out = {base};
  if (grid.is_null()) return out;
  if (!grid.is_object()) throw ArgumentError(std::string(where) + " must be an object");
  for (const auto& [key, values] : grid.items()) {
    if (!values.is_array() || values.empty()) {
      throw ArgumentError(std::string(where) + "." + key + " must be a non-empty array");
    }
    std::vector<Json> next;
    for (const auto& partial : out) {
      for (const auto& v : values) {
        Json obj = partial;
        if (key == "b_max") obj.erase("t_max");
        if (key == "t_max") obj.erase("b_max");
        obj[key] = v;
        next.push_back(std::move(obj));
      }
    }
    out = std::move(next);
  }
  return out;
}

RunConfig ParseRunConfigJson(const Json& root, const std::filesystem::path& base) {
  CheckKeys(root, "config",
            {"dataset", "split", "k", "distance", "du_policy", "strategy", "seeds",
             "output_dir", "grid", "shapley"});
  RunConfig c;

  if (!root.contains("dataset")) throw ArgumentError("config.dataset is required");
  const Json& ds = root.at("dataset");
  CheckKeys(ds, "dataset", {"path", "format", "synthetic"});
  if (ds.contains("path") == ds.contains("synthetic")) {
    throw ArgumentError("dataset needs exactly one of path and synthetic");
  }
  if (ds.contains("path")) {
    c.dataset.path = Resolve(base, Get<std::string>(ds, "path", "dataset"));
    c.dataset.format = ds.contains("format")
                           ? ParseDataFormat(Get<std::string>(ds, "format", "dataset"))
                           : InferFormat(*c.dataset.path);
  } else {
    if (ds.contains("format")) throw ArgumentError("dataset.format needs a path");
    c.dataset.synthetic = ParseSynthetic(ds.at("synthetic"));
  }

  if (!root.contains("split")) throw ArgumentError("config.split is required");
  const Json& sp = root.at("split");
  CheckKeys(sp, "split", {"train_n", "val_n", "test_n", "seed"});
  c.split.train_n = GetCount(sp, "train_n", 0, "split");
  c.split.val_n = GetCount(sp, "val_n", 0, "split");
  c.split.test_n = GetCount(sp, "test_n", 0, "split");
  c.split.seed = GetCount(sp, "seed", 0, "split");
  if (c.split.train_n == 0 || c.split.val_n == 0) {
    throw ArgumentError("split.train_n and split.val_n must be positive");
  }

  c.knn.k = GetCount(root, "k", c.knn.k, "config");
  if (c.knn.k < 1) throw ArgumentError("k must be at least 1");
  if (root.contains("distance")) {
    c.knn.metric = ParseDistanceMetric(Get<std::string>(root, "distance", "config"));
  }

  const Json policy_obj = root.contains("du_policy") ? root.at("du_policy") : Json::object();
  const Json strategy_obj = root.contains("strategy") ? root.at("strategy") : Json::object();
  c.du_policy = ParsePolicy(policy_obj);
  c.strategy = ParseStrategy(strategy_obj);

  if (root.contains("seeds")) {
    const Json& seeds = root.at("seeds");
    if (!seeds.is_array() || seeds.empty()) {
      throw ArgumentError("seeds must be a non-empty array");
    }
    c.seeds.clear();
    for (const auto& s : seeds) {
      if (!IsCount(s)) {
        throw ArgumentError("seeds must be non-negative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (root.contains("output_dir")) {
    c.output_dir = Resolve(base, Get<std::string>(root, "output_dir", "config"));
  }

  Json du_sweep, strategy_sweep;
  if (root.contains("grid")) {
    const Json& grid = root.at("grid");
    CheckKeys(grid, "grid", {"du_policy", "strategy"});
    if (grid.contains("du_policy")) du_sweep = grid.at("du_policy");
    if (grid.contains("strategy")) strategy_sweep = grid.at("strategy");
  }
  for (const auto& obj : Expand(policy_obj, du_sweep, "grid.du_policy")) {
    c.du_grid.push_back(ParsePolicy(obj));
  }
  for (const auto& obj : Expand(strategy_obj, strategy_sweep, "grid.strategy")) {
    c.strategy_grid.push_back(ParseStrategy(obj));
  }

  if (root.contains("shapley")) {
    const Json& sh = root.at("shapley");
    CheckKeys(sh, "shapley", {"target", "fractions", "random_orders"});
    if (sh.contains("target")) {
      const Json& t = sh.at("target");
      if (t.is_string()) {
        if (t.get<std::string>() != "originals") {
          throw ArgumentError("shapley.target must be \"originals\" or {centers_from}");
        }
      } else {
        CheckKeys(t, "shapley.target", {"centers_from"});
        c.shapley.centers_from =
            Resolve(base, Get<std::string>(t, "centers_from", "shapley.target"));
      }
    }
    if (sh.contains("fractions")) {
      c.shapley.fractions = Get<std::vector<double>>(sh, "fractions", "shapley");
      if (c.shapley.fractions.empty()) {
        throw ArgumentError("shapley.fractions must not be empty");
      }
      for (double f : c.shapley.fractions) {
        if (!(f > 0 && f <= 1)) throw ArgumentError("shapley.fractions must lie in (0, 1]");
      }
    }
    c.shapley.random_orders =
        GetCount(sh, "random_orders", c.shapley.random_orders, "shapley");
    if (c.shapley.random_orders < 1) {
      throw ArgumentError("shapley.random_orders must be at least 1");
    }
  }
  return c;
}

}  // namespace

RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  return ParseRunConfigJson(root, base_dir);
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadFile(path), path.parent_path());
}

Dataset LoadConfiguredDataset(const RunConfig& config) {
  if (config.dataset.synthetic) return GenerateSynthetic(*config.dataset.synthetic);
  if (!config.dataset.path) throw ArgumentError("config has no dataset");
  return LoadDataset(*config.dataset.path, config.dataset.format);
}

DatasetSplit MakeSplit(const RunConfig& config, const Dataset& data) {
  return SplitDataset(data, config.split.train_n, config.split.val_n,
                      config.split.test_n, config.split.seed);
}

DUPolicy ResolvePolicy(const PolicySpec& spec, const DatasetSplit& split,
                       const KnnOptions& knn) {
  DUPolicy p = spec.policy;
  if (spec.full_data_target) p.u_target = FullDataUtility(split, knn);
  return p;
}

}  // namespace idg
