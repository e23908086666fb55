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

#include "idg/denoiser.h"

#include <cmath>
#include <unordered_map>

#include "idg/errors.h"

namespace idg {

void CenterTable::Update(PointId id, std::span<const double> values) {
  if (values.size() != dim_) {
    throw ArgumentError("release has dimension " +
                        std::to_string(values.size()) + ", table has " +
                        std::to_string(dim_));
  }
  auto [it, inserted] = entries_.try_emplace(id);
  Entry& e = it->second;
  if (inserted) {
    e.center.assign(values.begin(), values.end());
    e.count = 1;
    return;
  }
  const double t = static_cast<double>(e.count);
  for (std::size_t j = 0; j < dim_; ++j) {
    e.center[j] = (e.center[j] * t + values[j]) / (t + 1.0);
  }
  ++e.count;
}

const std::vector<double>& CenterTable::Center(PointId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw ArgumentError("no center for point " + std::to_string(id));
  }
  return it->second.center;
}

std::uint64_t CenterTable::Count(PointId id) const {
  const auto it = entries_.find(id);
  return it == entries_.end() ? 0 : it->second.count;
}

namespace {

std::unordered_map<PointId, std::size_t> RowIndex(const Dataset& ds) {
  std::unordered_map<PointId, std::size_t> index;
  index.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) index.emplace(ds.id(i), i);
  return index;
}

}  // namespace

Dataset CenterTable::Snapshot(const Dataset& originals) const {
  const auto index = RowIndex(originals);
  std::vector<double> features;
  std::vector<Label> labels;
  std::vector<PointId> ids;
  for (const auto& [id, e] : entries_) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw ArgumentError("center id " + std::to_string(id) +
                          " not in original dataset");
    }
    features.insert(features.end(), e.center.begin(), e.center.end());
    labels.push_back(originals.label(it->second));
    ids.push_back(id);
  }
  return Dataset(dim_, std::move(features), std::move(labels), std::move(ids));
}

double CenterFidelity(const CenterTable& table, const Dataset& originals) {
  if (table.size() == 0) return 0.0;
  if (table.dim() != originals.dim()) {
    throw ArgumentError("center and original dimensions differ");
  }
  const auto index = RowIndex(originals);
  double total = 0;
  for (const auto& [id, e] : table.entries()) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw ArgumentError("center id " + std::to_string(id) +
                          " not in original dataset");
    }
    const auto x = originals.row(it->second);
    double sq = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = e.center[j] - x[j];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(table.size());
}

}  // namespace idg
