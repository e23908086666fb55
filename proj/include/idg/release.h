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

// The Data Union side of the game: the clamp-then-Laplace release mechanism
// and the per-point privacy budget ledger.

#ifndef IDG_RELEASE_H_
#define IDG_RELEASE_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "idg/dataset.h"
#include "idg/random.h"

namespace idg {

struct ReleaseConfig {
  // Laplace budget per feature; the scale for feature j is
  // sensitivity_j / eps_per_feature.
  double eps_per_feature = 1.0;
  FeatureBounds bounds;
};

struct NoisyVector {
  PointId point_id = 0;
  std::vector<double> values;
  // 1-based count of releases of this point, including this one.
  std::uint64_t query_index = 0;
};

// Releases clamp(x_j, a_j, b_j) + Laplace(sensitivity_j / eps) for every
// feature. Zero-sensitivity features come back as a_j with no noise.
std::vector<double> NoisyRelease(std::span<const double> point,
                                 const ReleaseConfig& config, Rng& rng);

// Substream for the query_index-th release of a point within a run.
inline std::uint64_t ReleaseSeed(std::uint64_t run_seed, PointId id,
                                 std::uint64_t query_index) {
  return DeriveSeed(run_seed, {static_cast<std::uint64_t>(Stream::kRelease),
                               id, query_index});
}

// Linear per-point spend accounting. Each query of a point costs
// charge_per_query units; a point may spend at most max_per_point.
// Spend is tracked as a query count so that remaining + spent == max holds
// without accumulated rounding.
class BudgetLedger {
 public:
  BudgetLedger(std::span<const PointId> ids, double charge_per_query,
               double max_per_point);

  double charge_per_query() const { return charge_; }
  double max_per_point() const { return max_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<PointId>& ids() const { return ids_; }

  bool Contains(PointId id) const { return index_.contains(id); }

  // True when another query of `id` fits within the cap.
  bool CanCharge(PointId id) const;

  // Debits one query. Throws BudgetExhaustedError when it does not fit.
  void Charge(PointId id);

  double Spent(PointId id) const;
  double Remaining(PointId id) const;
  std::uint64_t Queries(PointId id) const;

  // Remaining / max_per_point, in [0, 1].
  double RemainingFraction(PointId id) const;

  // charge_per_query * total number of queries.
  double TotalSpent() const;

  // Per-point spend in id order of construction.
  std::vector<double> SpentVector() const;

  // [{"id":..,"spent":..,"remaining":..}, ...]
  std::string ToJson() const;

 private:
  std::size_t IndexOrThrow(PointId id) const;

  double charge_;
  double max_;
  std::vector<PointId> ids_;
  std::unordered_map<PointId, std::size_t> index_;
  std::vector<std::uint64_t> queries_;
  std::uint64_t max_queries_;
};

}  // namespace idg

#endif  // IDG_RELEASE_H_
