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

// Labeled feature datasets, their on-disk formats, deterministic splits and
// the synthetic cluster generator used by the experiments.
//
// Binary layout (little-endian):
//   "IDGD" | u32 version (=1) | u32 n | u32 d | n x i32 labels |
//   n*d x f64 features, row-major.
// CSV layout: header `label,f0,...,f{d-1}`, one row per point.
// Point ids are implicit row indices in both formats.

#ifndef IDG_DATASET_H_
#define IDG_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace idg {

using PointId = std::uint32_t;
using Label = std::int32_t;

// Immutable n x d matrix of features with one label and one id per row.
class Dataset {
 public:
  Dataset() = default;

  // Validates the row/label/id counts and id uniqueness. `ids` may be empty,
  // in which case rows are numbered 0..n-1.
  Dataset(std::size_t dim, std::vector<double> features,
          std::vector<Label> labels, std::vector<PointId> ids = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  PointId id(std::size_t i) const { return ids_[i]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<PointId>& ids() const { return ids_; }

  // Rows in the given order; ids are carried over.
  Dataset Subset(std::span<const std::size_t> rows) const;

  // Row index of `id`, or size() when absent.
  std::size_t IndexOf(PointId id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> features_;
  std::vector<Label> labels_;
  std::vector<PointId> ids_;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Per-feature clamping interval [lower_j, upper_j] fixed before any release.
struct FeatureBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  double sensitivity(std::size_t j) const { return upper[j] - lower[j]; }
};

enum class DataFormat { kCsv, kBinary };

DataFormat ParseDataFormat(std::string_view name);

Dataset LoadDataset(const std::filesystem::path& path, DataFormat format);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path,
                 DataFormat format);

// In-memory codecs behind LoadDataset/SaveDataset.
std::string EncodeCsv(const Dataset& dataset);
Dataset DecodeCsv(std::string_view text);
std::string EncodeBinary(const Dataset& dataset);
Dataset DecodeBinary(std::string_view bytes);

// Seeded shuffle, then the first train_n rows go to train, the next val_n to
// validation and the next test_n to test.
DatasetSplit SplitDataset(const Dataset& dataset, std::size_t train_n,
                          std::size_t val_n, std::size_t test_n,
                          std::uint64_t seed);

FeatureBounds ComputeFeatureBounds(const Dataset& train);

// Gaussian clusters, one per class. With b = c / d (integer division), class
// c is centered on (-1)^b (1 + b / 2) e_{c mod d}: the first 2d classes sit on
// the corners of a cross-polytope, later ones on scaled copies. Clean labels
// are assigned round-robin by row; each label is then resampled among the
// other classes with probability label_noise.
struct SyntheticSpec {
  std::size_t n = 500;
  std::size_t d = 4;
  std::size_t num_classes = 2;
  double cluster_spread = 0.5;
  double label_noise = 0.0;
  std::uint64_t seed = 0;
};

Dataset GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace idg

#endif  // IDG_DATASET_H_
