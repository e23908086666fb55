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

#ifndef IDG_DENOISER_H_
#define IDG_DENOISER_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "idg/dataset.h"
#include "idg/release.h"

namespace idg {

// Running mean of every noisy release seen for each point. Centers are not
// re-clamped to the feature bounds.
class CenterTable {
 public:
  explicit CenterTable(std::size_t dim) : dim_(dim) {}

  struct Entry {
    std::vector<double> center;
    std::uint64_t count = 0;
  };

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool Contains(PointId id) const { return entries_.contains(id); }

  // Folds one release into the point's mean; creates the entry on first use.
  void Update(PointId id, std::span<const double> values);
  void Update(const NoisyVector& noisy) { Update(noisy.point_id, noisy.values); }

  // Throws ArgumentError for an unknown id.
  const std::vector<double>& Center(PointId id) const;
  std::uint64_t Count(PointId id) const;

  const std::map<PointId, Entry>& entries() const { return entries_; }

  // Centers as a dataset, labels taken from `originals` by id, rows in
  // ascending id order.
  Dataset Snapshot(const Dataset& originals) const;

 private:
  std::size_t dim_;
  std::map<PointId, Entry> entries_;
};

// Mean over table entries of || center_i - x_i ||_2.
double CenterFidelity(const CenterTable& table, const Dataset& originals);

}  // namespace idg

#endif  // IDG_DENOISER_H_
