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

// Python bindings: idg._core.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "idg/commands.h"
#include "idg/config.h"
#include "idg/dataset.h"
#include "idg/denoiser.h"
#include "idg/errors.h"
#include "idg/game.h"
#include "idg/knn.h"
#include "idg/metrics.h"
#include "idg/release.h"
#include "idg/strategies.h"

namespace py = pybind11;

namespace {

using idg::Dataset;
using idg::Label;
using idg::PointId;

using FeatureArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset MakeDataset(const FeatureArray& features, std::vector<Label> labels,
                    std::vector<PointId> ids) {
  if (features.ndim() != 2) throw idg::ArgumentError("features must be 2-D");
  const auto n = static_cast<std::size_t>(features.shape(0));
  const auto d = static_cast<std::size_t>(features.shape(1));
  std::vector<double> flat(features.data(), features.data() + n * d);
  return Dataset(d, std::move(flat), std::move(labels), std::move(ids));
}

py::array_t<double> FeaturesOf(const Dataset& ds) {
  py::array_t<double> out({ds.size(), ds.dim()});
  std::copy(ds.features().begin(), ds.features().end(), out.mutable_data());
  return out;
}

std::vector<double> ToVector(const FeatureArray& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information Disclosure Game simulation engine";

  py::register_exception<idg::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<idg::IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<idg::BudgetExhaustedError>(m, "BudgetExhaustedError",
                                                    PyExc_RuntimeError);
  py::register_exception<idg::NoNeighborsError>(m, "NoNeighborsError",
                                                PyExc_RuntimeError);
  py::register_exception<idg::UndefinedMetricError>(m, "UndefinedMetricError",
                                                    PyExc_ArithmeticError);
  // ArgumentError derives from std::invalid_argument, which maps to ValueError.

  // core-data -------------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&MakeDataset), py::arg("features"), py::arg("labels"),
           py::arg("ids") = std::vector<PointId>{})
      .def_property_readonly("n", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("features", &FeaturesOf)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("ids", &Dataset::ids)
      .def("subset", [](const Dataset& ds, std::vector<std::size_t> rows) {
        return ds.Subset(rows);
      })
      .def("__len__", &Dataset::size)
      .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

  py::class_<idg::DatasetSplit>(m, "DatasetSplit")
      .def_readonly("train", &idg::DatasetSplit::train)
      .def_readonly("validation", &idg::DatasetSplit::validation)
      .def_readonly("test", &idg::DatasetSplit::test);

  py::class_<idg::FeatureBounds>(m, "FeatureBounds")
      .def_readonly("lower", &idg::FeatureBounds::lower)
      .def_readonly("upper", &idg::FeatureBounds::upper)
      .def("sensitivity", &idg::FeatureBounds::sensitivity);

  py::class_<idg::SyntheticSpec>(m, "SyntheticSpec")
      .def(py::init<>())
      .def_readwrite("n", &idg::SyntheticSpec::n)
      .def_readwrite("d", &idg::SyntheticSpec::d)
      .def_readwrite("num_classes", &idg::SyntheticSpec::num_classes)
      .def_readwrite("cluster_spread", &idg::SyntheticSpec::cluster_spread)
      .def_readwrite("label_noise", &idg::SyntheticSpec::label_noise)
      .def_readwrite("seed", &idg::SyntheticSpec::seed);

  m.def("load_dataset",
        [](const std::filesystem::path& p, const std::string& format) {
          return idg::LoadDataset(p, idg::ParseDataFormat(format));
        },
        py::arg("path"), py::arg("format") = "binary");
  m.def("save_dataset",
        [](const Dataset& ds, const std::filesystem::path& p, const std::string& format) {
          idg::SaveDataset(ds, p, idg::ParseDataFormat(format));
        },
        py::arg("dataset"), py::arg("path"), py::arg("format") = "binary");
  m.def("encode_binary", [](const Dataset& ds) { return py::bytes(idg::EncodeBinary(ds)); });
  m.def("decode_binary", [](const py::bytes& b) { return idg::DecodeBinary(std::string(b)); });
  m.def("encode_csv", &idg::EncodeCsv);
  m.def("decode_csv", [](const std::string& s) { return idg::DecodeCsv(s); });
  m.def("split_dataset", &idg::SplitDataset, py::arg("dataset"), py::arg("train_n"),
        py::arg("val_n"), py::arg("test_n"), py::arg("seed"));
  m.def("compute_feature_bounds", &idg::ComputeFeatureBounds);
  m.def("generate_synthetic", &idg::GenerateSynthetic);

  // dp-release ------------------------------------------------------------
  m.def("noisy_release",
        [](const FeatureArray& point, const idg::FeatureBounds& bounds,
           double eps_per_feature, std::uint64_t seed) {
          idg::Rng rng(seed);
          return idg::NoisyRelease(ToVector(point), {eps_per_feature, bounds}, rng);
        },
        py::arg("point"), py::arg("bounds"), py::arg("eps_per_feature"), py::arg("seed"));
  m.def("release_seed", &idg::ReleaseSeed);

  py::class_<idg::BudgetLedger>(m, "BudgetLedger")
      .def(py::init([](std::vector<PointId> ids, double charge, double max) {
             return idg::BudgetLedger(ids, charge, max);
           }),
           py::arg("ids"), py::arg("charge_per_query"), py::arg("max_per_point"))
      .def("can_charge", &idg::BudgetLedger::CanCharge)
      .def("charge", &idg::BudgetLedger::Charge)
      .def("spent", &idg::BudgetLedger::Spent)
      .def("remaining", &idg::BudgetLedger::Remaining)
      .def("queries", &idg::BudgetLedger::Queries)
      .def("total_spent", &idg::BudgetLedger::TotalSpent)
      .def("spent_vector", &idg::BudgetLedger::SpentVector)
      .def("to_json", &idg::BudgetLedger::ToJson);

  // denoiser --------------------------------------------------------------
  py::class_<idg::CenterTable>(m, "CenterTable")
      .def(py::init<std::size_t>())
      .def("update",
           [](idg::CenterTable& t, PointId id, const FeatureArray& x) {
             t.Update(id, ToVector(x));
           })
      .def("center", &idg::CenterTable::Center)
      .def("count", &idg::CenterTable::Count)
      .def("snapshot", &idg::CenterTable::Snapshot)
      .def("__len__", &idg::CenterTable::size);
  m.def("center_fidelity", &idg::CenterFidelity);

  // knn-valuation ---------------------------------------------------------
  py::class_<idg::TrainView>(m, "TrainView")
      .def(py::init([](const Dataset& ds, std::optional<std::vector<PointId>> active,
                       const std::string& metric) {
             const auto dm = idg::ParseDistanceMetric(metric);
             if (active) return idg::TrainView(ds, *active, dm);
             return idg::TrainView(ds, dm);
           }),
           py::arg("data"), py::arg("active_ids") = std::nullopt,
           py::arg("metric") = "l2")
      .def_property_readonly("active_ids", &idg::TrainView::ActiveIds);

  m.def("knn_predict",
        [](const idg::TrainView& v, const FeatureArray& q, std::size_t k) {
          return idg::KnnPredict(v, ToVector(q), k);
        });
  m.def("evaluate_utility", &idg::EvaluateUtility);
  m.def("macro_f1", &idg::MacroF1);
  m.def("label_agreement", &idg::LabelAgreement);

  py::class_<idg::ValuationVector>(m, "ValuationVector")
      .def_readonly("ids", &idg::ValuationVector::ids)
      .def_readonly("values", &idg::ValuationVector::values)
      .def_property_readonly("method", [](const idg::ValuationVector& v) {
        return std::string(idg::ToString(v.method));
      })
      .def_readonly("eval_size", &idg::ValuationVector::eval_size)
      .def("sum", &idg::ValuationVector::Sum)
      .def("to_csv", &idg::ValuationVector::ToCsv);
  m.def("exact_knn_shapley", &idg::ExactKnnShapley, py::arg("view"),
        py::arg("eval_set"), py::arg("k"));
  m.def("monte_carlo_shapley",
        [](const idg::TrainView& v, const Dataset& eval, std::size_t k,
           bool exhaustive, std::size_t permutations, std::uint64_t seed,
           const std::string& value) {
          idg::MonteCarloOptions o;
          o.exhaustive = exhaustive;
          o.num_permutations = permutations;
          o.seed = seed;
          if (value == "accuracy") {
            o.value = idg::ValueFunction::kAccuracy;
          } else if (value == "soft_vote") {
            o.value = idg::ValueFunction::kSoftVote;
          } else {
            throw idg::ArgumentError("value must be accuracy or soft_vote");
          }
          return idg::MonteCarloShapley(v, eval, k, o);
        },
        py::arg("view"), py::arg("eval_set"), py::arg("k"),
        py::arg("exhaustive") = false, py::arg("num_permutations") = 1000,
        py::arg("seed") = 0, py::arg("value") = "accuracy");

  // strategies / game -----------------------------------------------------
  py::class_<idg::DUPolicy>(m, "DUPolicy")
      .def(py::init<>())
      .def_readwrite("charge_per_query", &idg::DUPolicy::charge_per_query)
      .def_readwrite("t_max", &idg::DUPolicy::t_max)
      .def_readwrite("eps_per_feature", &idg::DUPolicy::eps_per_feature)
      .def_readwrite("u_target", &idg::DUPolicy::u_target)
      .def_property_readonly("b_max", &idg::DUPolicy::b_max);

  py::class_<idg::KnnOptions>(m, "KnnOptions")
      .def(py::init([](std::size_t k, const std::string& metric) {
             return idg::KnnOptions{k, idg::ParseDistanceMetric(metric)};
           }),
           py::arg("k") = 5, py::arg("metric") = "l2");

  py::class_<idg::StrategyConfig>(m, "StrategyConfig")
      .def(py::init<>())
      .def_property(
          "kind", [](const idg::StrategyConfig& s) { return std::string(idg::ToString(s.kind)); },
          [](idg::StrategyConfig& s, const std::string& v) { s.kind = idg::ParseStrategyKind(v); })
      .def_readwrite("fraction", &idg::StrategyConfig::fraction)
      .def_readwrite("bootstrap_iters", &idg::StrategyConfig::bootstrap_iters)
      .def_readwrite("exploration_c", &idg::StrategyConfig::exploration_c)
      .def_readwrite("learning_rate", &idg::StrategyConfig::learning_rate)
      .def_readwrite("stability_eps", &idg::StrategyConfig::stability_eps)
      .def_property(
          "unqueried_policy",
          [](const idg::StrategyConfig& s) { return std::string(idg::ToString(s.unqueried_policy)); },
          [](idg::StrategyConfig& s, const std::string& v) {
            s.unqueried_policy = idg::ParseUnqueriedPolicy(v);
          })
      .def_property(
          "reward", [](const idg::StrategyConfig& s) { return std::string(idg::ToString(s.reward)); },
          [](idg::StrategyConfig& s, const std::string& v) { s.reward = idg::ParseRewardMode(v); })
      .def_readwrite("refine_all", &idg::StrategyConfig::refine_all)
      .def_readwrite("max_iterations", &idg::StrategyConfig::max_iterations);

  py::class_<idg::IterationRecord>(m, "IterationRecord")
      .def_readonly("t", &idg::IterationRecord::t)
      .def_readonly("selected", &idg::IterationRecord::selected)
      .def_readonly("utility", &idg::IterationRecord::utility)
      .def_readonly("spend_this_iter", &idg::IterationRecord::spend_this_iter);

  py::class_<idg::RunTrace>(m, "RunTrace")
      .def_readonly("iterations", &idg::RunTrace::iterations)
      .def_readonly("success", &idg::RunTrace::success)
      .def_readonly("total_spend", &idg::RunTrace::total_spend)
      .def_readonly("final_utility", &idg::RunTrace::final_utility)
      .def_readonly("seed", &idg::RunTrace::seed)
      .def("iterations_run", &idg::RunTrace::IterationsRun)
      .def("to_csv", &idg::RunTrace::ToCsv);

  py::class_<idg::RunResult>(m, "RunResult")
      .def_readonly("trace", &idg::RunResult::trace)
      .def_readonly("ledger", &idg::RunResult::ledger)
      .def_readonly("centers", &idg::RunResult::centers)
      .def_readonly("q_values", &idg::RunResult::q_values)
      .def_readonly("final_selection", &idg::RunResult::final_selection);

  m.def("run_idg", &idg::RunIdg, py::arg("split"), py::arg("policy"),
        py::arg("strategy"), py::arg("knn"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("full_data_utility", &idg::FullDataUtility);
  m.def("select_random_subset", &idg::SelectRandomSubset);
  m.def("prefix_accuracy",
        [](const Dataset& train, std::vector<double> values, const Dataset& eval,
           double fraction, const idg::KnnOptions& knn) {
          return idg::PrefixAccuracy(train, values, eval, fraction, knn);
        });

  py::class_<idg::SeedOutcome>(m, "SeedOutcome")
      .def_readonly("seed", &idg::SeedOutcome::seed)
      .def_readonly("success", &idg::SeedOutcome::success)
      .def_readonly("iterations", &idg::SeedOutcome::iterations)
      .def_readonly("total_spend", &idg::SeedOutcome::total_spend)
      .def_readonly("final_utility", &idg::SeedOutcome::final_utility)
      .def_readonly("gini_spend", &idg::SeedOutcome::gini_spend)
      .def_readonly("spearman_q_shapley", &idg::SeedOutcome::spearman_q_shapley);

  py::class_<idg::GridResult>(m, "GridResult")
      .def_readonly("cell", &idg::GridResult::cell)
      .def_readonly("du_policy", &idg::GridResult::du_policy)
      .def_readonly("strategy", &idg::GridResult::strategy)
      .def_readonly("success", &idg::GridResult::success)
      .def_readonly("success_rate", &idg::GridResult::success_rate)
      .def_readonly("total_spend", &idg::GridResult::total_spend)
      .def_readonly("mean_iterations", &idg::GridResult::mean_iterations)
      .def_readonly("gini_spend", &idg::GridResult::gini_spend)
      .def_readonly("spearman_q_shapley", &idg::GridResult::spearman_q_shapley)
      .def_readonly("seeds", &idg::GridResult::seeds)
      .def_readonly("runs", &idg::GridResult::runs);

  m.def("grid_search",
        [](const idg::DatasetSplit& split, std::vector<idg::DUPolicy> du_grid,
           std::vector<idg::StrategyConfig> strategy_grid,
           std::vector<std::uint64_t> seeds, const idg::KnnOptions& knn,
           std::size_t threads) {
          idg::GridOptions o;
          o.knn = knn;
          o.threads = threads;
          py::gil_scoped_release release;
          return idg::GridSearch(split, du_grid, strategy_grid, seeds, o);
        },
        py::arg("split"), py::arg("du_grid"), py::arg("strategy_grid"),
        py::arg("seeds"), py::arg("knn"), py::arg("threads") = 1);
  m.def("grid_results_to_json", [](std::vector<idg::GridResult> r) {
    return idg::GridResultsToJson(r);
  });
  m.def("grid_results_from_json", [](const std::string& s) {
    return idg::GridResultsFromJson(s);
  });
  m.def("du_objective",
        [](std::vector<idg::GridResult> results,
           std::vector<idg::StrategyConfig> space) {
          return idg::DuObjective(results, space);
        });

  py::class_<idg::PricingSolution>(m, "PricingSolution")
      .def_readonly("feasible", &idg::PricingSolution::feasible)
      .def_readonly("subset", &idg::PricingSolution::subset)
      .def_readonly("cost", &idg::PricingSolution::cost);
  m.def("solve_pricing_game",
        [](std::vector<double> prices,
           const std::function<double(std::vector<std::size_t>)>& utility,
           double u_target) {
          return idg::SolvePricingGame(
              prices,
              [&](std::span<const std::size_t> s) {
                return utility(std::vector<std::size_t>(s.begin(), s.end()));
              },
              u_target);
        });

  // metrics-report --------------------------------------------------------
  m.def("gini", [](std::vector<double> v) { return idg::Gini(v); });
  m.def("spearman", [](std::vector<double> a, std::vector<double> b) {
    return idg::Spearman(a, b);
  });

  // cli -------------------------------------------------------------------
  py::class_<idg::CommandOptions>(m, "CommandOptions")
      .def(py::init<>())
      .def_readwrite("config", &idg::CommandOptions::config)
      .def_readwrite("output", &idg::CommandOptions::output)
      .def_readwrite("seed_override", &idg::CommandOptions::seed_override)
      .def_readwrite("threads", &idg::CommandOptions::threads);
  m.def("cmd_simulate", &idg::CmdSimulate, py::call_guard<py::gil_scoped_release>());
  m.def("cmd_grid", &idg::CmdGrid, py::call_guard<py::gil_scoped_release>());
  m.def("cmd_shapley", &idg::CmdShapley, py::call_guard<py::gil_scoped_release>());
  m.def("cmd_metrics", &idg::CmdMetrics, py::call_guard<py::gil_scoped_release>());
}
