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

#include "idg/release.h"

#include <algorithm>
#include <cmath>

#include "idg/errors.h"
#include "json.hpp"

namespace idg {

std::vector<double> NoisyRelease(std::span<const double> point,
                                 const ReleaseConfig& config, Rng& rng) {
  if (point.size() != config.bounds.dim()) {
    throw ArgumentError("point has dimension " + std::to_string(point.size()) +
                        ", bounds have " +
                        std::to_string(config.bounds.dim()));
  }
  if (!(config.eps_per_feature > 0)) {
    throw ArgumentError("eps_per_feature must be positive");
  }
  std::vector<double> out(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    const double lo = config.bounds.lower[j];
    const double hi = config.bounds.upper[j];
    const double clamped = std::clamp(point[j], lo, hi);
    const double sensitivity = hi - lo;
    // One uniform is consumed per feature regardless of sensitivity, so
    // degenerate features do not shift the stream for the others.
    const double noise = rng.Laplace(sensitivity / config.eps_per_feature);
    out[j] = sensitivity > 0 ? clamped + noise : lo;
  }
  return out;
}

BudgetLedger::BudgetLedger(std::span<const PointId> ids,
                           double charge_per_query, double max_per_point)
    : charge_(charge_per_query),
      max_(max_per_point),
      ids_(ids.begin(), ids.end()),
      queries_(ids.size(), 0) {
  if (!(charge_ > 0) || !std::isfinite(charge_)) {
    throw ArgumentError("charge_per_query must be positive");
  }
  if (!(max_ >= 0) || !std::isfinite(max_)) {
    throw ArgumentError("max_per_point must be non-negative");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw ArgumentError("duplicate ledger id " + std::to_string(ids_[i]));
    }
  }
  max_queries_ = static_cast<std::uint64_t>(std::floor(max_ / charge_ + 1e-9));
}

std::size_t BudgetLedger::IndexOrThrow(PointId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw ArgumentError("unknown ledger id " + std::to_string(id));
  }
  return it->second;
}

bool BudgetLedger::CanCharge(PointId id) const {
  return queries_[IndexOrThrow(id)] < max_queries_;
}

void BudgetLedger::Charge(PointId id) {
  const std::size_t i = IndexOrThrow(id);
  if (queries_[i] >= max_queries_) {
    throw BudgetExhaustedError("privacy budget exhausted for point " +
                               std::to_string(id));
  }
  ++queries_[i];
}

double BudgetLedger::Spent(PointId id) const {
  return charge_ * static_cast<double>(queries_[IndexOrThrow(id)]);
}

double BudgetLedger::Remaining(PointId id) const {
  return std::max(0.0, max_ - Spent(id));
}

std::uint64_t BudgetLedger::Queries(PointId id) const {
  return queries_[IndexOrThrow(id)];
}

double BudgetLedger::RemainingFraction(PointId id) const {
  if (max_ == 0) {
    IndexOrThrow(id);
    return 0.0;
  }
  return Remaining(id) / max_;
}

double BudgetLedger::TotalSpent() const {
  std::uint64_t total = 0;
  for (auto q : queries_) total += q;
  return charge_ * static_cast<double>(total);
}

std::vector<double> BudgetLedger::SpentVector() const {
  std::vector<double> out(queries_.size());
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    out[i] = charge_ * static_cast<double>(queries_[i]);
  }
  return out;
}

std::string BudgetLedger::ToJson() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (PointId id : ids_) {
    nlohmann::ordered_json entry;
    entry["id"] = id;
    entry["spent"] = Spent(id);
    entry["remaining"] = Remaining(id);
    arr.push_back(std::move(entry));
  }
  return arr.dump(2) + "\n";
}

}  // namespace idg
