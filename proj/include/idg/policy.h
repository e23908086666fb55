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

// Types shared by the strategies and the game driver.

#ifndef IDG_POLICY_H_
#define IDG_POLICY_H_

#include <cstdint>
#include <vector>

#include "idg/denoiser.h"
#include "idg/knn.h"
#include "idg/release.h"
#include "idg/trace.h"

namespace idg {

// The Data Union's disclosure policy.
struct DUPolicy {
  double charge_per_query = 1.0;  // budget units per point per query
  std::uint64_t t_max = 100;      // per-point query cap
  double eps_per_feature = 1.0;   // Laplace budget per feature and release
  double u_target = 1.0;          // validation accuracy that ends the game

  double b_max() const { return static_cast<double>(t_max) * charge_per_query; }

  // Throws ArgumentError on a non-positive B_max, charge or epsilon.
  void Validate() const;

  friend bool operator==(const DUPolicy&, const DUPolicy&) = default;
};

struct KnnOptions {
  std::size_t k = 5;
  DistanceMetric metric = DistanceMetric::kL2;
};

// Everything a run leaves behind.
struct RunResult {
  RunTrace trace;
  BudgetLedger ledger;
  CenterTable centers;
  // Bandit Q-values in train row order; empty for ranking strategies.
  std::vector<double> q_values;
  // Strategy-specific ranking used at the end of the run, if any.
  std::vector<PointId> final_selection;
};

}  // namespace idg

#endif  // IDG_POLICY_H_
