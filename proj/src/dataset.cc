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

#include "idg/dataset.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "idg/errors.h"
#include "idg/io.h"
#include "idg/random.h"

namespace idg {

Dataset::Dataset(std::size_t dim, std::vector<double> features,
                 std::vector<Label> labels, std::vector<PointId> ids)
    : dim_(dim),
      features_(std::move(features)),
      labels_(std::move(labels)),
      ids_(std::move(ids)) {
  if (!labels_.empty() && dim_ == 0) {
    throw ArgumentError("dataset dimension must be at least 1");
  }
  if (features_.size() != labels_.size() * dim_) {
    throw ArgumentError("feature count " + std::to_string(features_.size()) +
                        " does not match " + std::to_string(labels_.size()) +
                        " rows of dimension " + std::to_string(dim_));
  }
  if (ids_.empty()) {
    ids_.resize(labels_.size());
    std::iota(ids_.begin(), ids_.end(), PointId{0});
  } else if (ids_.size() != labels_.size()) {
    throw ArgumentError("id count does not match row count");
  }
  std::unordered_set<PointId> seen(ids_.begin(), ids_.end());
  if (seen.size() != ids_.size()) throw ArgumentError("point ids must be unique");
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  std::vector<double> features;
  std::vector<Label> labels;
  std::vector<PointId> ids;
  features.reserve(rows.size() * dim_);
  labels.reserve(rows.size());
  ids.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw ArgumentError("subset row out of range");
    const auto x = row(r);
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(labels_[r]);
    ids.push_back(ids_[r]);
  }
  Dataset out;
  out.dim_ = dim_;
  out.features_ = std::move(features);
  out.labels_ = std::move(labels);
  out.ids_ = std::move(ids);
  if (std::unordered_set<PointId>(out.ids_.begin(), out.ids_.end()).size() !=
      out.ids_.size()) {
    throw ArgumentError("subset rows must be distinct");
  }
  return out;
}

std::size_t Dataset::IndexOf(PointId id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  return static_cast<std::size_t>(it - ids_.begin());
}

DataFormat ParseDataFormat(std::string_view name) {
  if (name == "csv") return DataFormat::kCsv;
  if (name == "binary" || name == "bin") return DataFormat::kBinary;
  throw ArgumentError("unknown dataset format: " + std::string(name));
}

// ---------------------------------------------------------------------------
// CSV

std::string EncodeCsv(const Dataset& dataset) {
  std::string out = "label";
  for (std::size_t j = 0; j < dataset.dim(); ++j) {
    out += ",f" + std::to_string(j);
  }
  out += '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out += std::to_string(dataset.label(i));
    for (double v : dataset.row(i)) {
      out += ',';
      out += FormatDouble(v);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view StripCr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

Dataset DecodeCsv(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = StripCr(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw ParseError("missing CSV header", 1);
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB &&
      static_cast<unsigned char>(line[2]) == 0xBF) {
    line.remove_prefix(3);
  }
  const auto header = SplitFields(line);
  if (header.empty() || header[0] != "label") {
    throw ParseError("CSV header must start with 'label'", line_no);
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 1] != "f" + std::to_string(j)) {
      throw ParseError("CSV header column " + std::to_string(j + 2) +
                           " must be f" + std::to_string(j),
                       line_no);
    }
  }

  std::vector<double> features;
  std::vector<Label> labels;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != dim + 1) {
      throw ParseError("expected " + std::to_string(dim + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Label label = 0;
    const auto lf = fields[0];
    const auto lr = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (lr.ec != std::errc() || lr.ptr != lf.data() + lf.size()) {
      throw ParseError("label is not an integer: '" + std::string(lf) + "'",
                       line_no);
    }
    labels.push_back(label);
    for (std::size_t j = 1; j <= dim; ++j) {
      const auto f = fields[j];
      double v = 0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size()) {
        throw ParseError("feature is not a real number: '" + std::string(f) +
                             "'",
                         line_no);
      }
      features.push_back(v);
    }
  }
  if (labels.empty()) {
    Dataset empty(dim, {}, {});
    return empty;
  }
  if (dim == 0) throw ParseError("CSV has no feature columns", 1);
  return Dataset(dim, std::move(features), std::move(labels));
}

// ---------------------------------------------------------------------------
// Binary

namespace {

constexpr char kMagic[4] = {'I', 'D', 'G', 'D'};
constexpr std::uint32_t kBinaryVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t GetU32(std::string_view in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i]))
         << (8 * i);
  }
  return v;
}

std::uint64_t GetU64(std::string_view in, std::size_t offset) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i]))
         << (8 * i);
  }
  return v;
}

}  // namespace

std::string EncodeBinary(const Dataset& dataset) {
  if (dataset.size() > UINT32_MAX || dataset.dim() > UINT32_MAX) {
    throw ArgumentError("dataset too large for the binary format");
  }
  std::string out(kMagic, 4);
  out.reserve(kHeaderBytes + dataset.size() * (4 + 8 * dataset.dim()));
  PutU32(out, kBinaryVersion);
  PutU32(out, static_cast<std::uint32_t>(dataset.size()));
  PutU32(out, static_cast<std::uint32_t>(dataset.dim()));
  for (Label l : dataset.labels()) PutU32(out, std::bit_cast<std::uint32_t>(l));
  for (double v : dataset.features()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

Dataset DecodeBinary(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes) throw ParseError("truncated header", bytes.size());
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError("bad magic", 0);
  const std::uint32_t version = GetU32(bytes, 4);
  if (version != kBinaryVersion) {
    throw ParseError("unsupported version " + std::to_string(version), 4);
  }
  const std::size_t n = GetU32(bytes, 8);
  const std::size_t d = GetU32(bytes, 12);
  const std::size_t expected = kHeaderBytes + n * 4 + n * d * 8;
  if (bytes.size() != expected) {
    throw ParseError("payload size " + std::to_string(bytes.size()) +
                         " does not match header (expected " +
                         std::to_string(expected) + ")",
                     std::min(bytes.size(), expected));
  }
  if (n > 0 && d == 0) throw ParseError("dimension must be at least 1", 12);
  std::vector<Label> labels(n);
  std::size_t offset = kHeaderBytes;
  for (std::size_t i = 0; i < n; ++i, offset += 4) {
    labels[i] = std::bit_cast<Label>(GetU32(bytes, offset));
  }
  std::vector<double> features(n * d);
  for (std::size_t i = 0; i < n * d; ++i, offset += 8) {
    features[i] = std::bit_cast<double>(GetU64(bytes, offset));
  }
  return Dataset(d, std::move(features), std::move(labels));
}

Dataset LoadDataset(const std::filesystem::path& path, DataFormat format) {
  const std::string bytes = ReadFile(path);
  return format == DataFormat::kCsv ? DecodeCsv(bytes) : DecodeBinary(bytes);
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path,
                 DataFormat format) {
  WriteFileAtomic(path, format == DataFormat::kCsv ? EncodeCsv(dataset)
                                                   : EncodeBinary(dataset));
}

// ---------------------------------------------------------------------------

DatasetSplit SplitDataset(const Dataset& dataset, std::size_t train_n,
                          std::size_t val_n, std::size_t test_n,
                          std::uint64_t seed) {
  if (train_n + val_n + test_n > dataset.size()) {
    throw ArgumentError("split sizes " + std::to_string(train_n) + "+" +
                        std::to_string(val_n) + "+" + std::to_string(test_n) +
                        " exceed dataset size " +
                        std::to_string(dataset.size()));
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kSplit)}));
  rng.Shuffle(order);
  const std::span<const std::size_t> all(order);
  DatasetSplit split;
  split.train = dataset.Subset(all.subspan(0, train_n));
  split.validation = dataset.Subset(all.subspan(train_n, val_n));
  split.test = dataset.Subset(all.subspan(train_n + val_n, test_n));
  return split;
}

FeatureBounds ComputeFeatureBounds(const Dataset& train) {
  if (train.empty()) throw ArgumentError("feature bounds need a non-empty train set");
  FeatureBounds bounds;
  const auto first = train.row(0);
  bounds.lower.assign(first.begin(), first.end());
  bounds.upper.assign(first.begin(), first.end());
  for (std::size_t i = 1; i < train.size(); ++i) {
    const auto x = train.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      bounds.lower[j] = std::min(bounds.lower[j], x[j]);
      bounds.upper[j] = std::max(bounds.upper[j], x[j]);
    }
  }
  for (std::size_t j = 0; j < bounds.dim(); ++j) {
    if (!std::isfinite(bounds.sensitivity(j))) {
      throw ArgumentError("feature " + std::to_string(j) +
                          " has a non-finite range");
    }
  }
  return bounds;
}

Dataset GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.n < spec.num_classes) {
    throw ArgumentError("synthetic data needs n >= num_classes >= 1");
  }
  if (spec.d < 1) throw ArgumentError("synthetic data needs d >= 1");
  if (!(spec.label_noise >= 0.0 && spec.label_noise <= 1.0)) {
    throw ArgumentError("label_noise must be a probability");
  }
  if (!(spec.cluster_spread >= 0.0) || !std::isfinite(spec.cluster_spread)) {
    throw ArgumentError("cluster_spread must be finite and non-negative");
  }

  Rng feature_rng(DeriveSeed(
      spec.seed, {static_cast<std::uint64_t>(Stream::kSyntheticFeatures)}));
  Rng label_rng(DeriveSeed(
      spec.seed, {static_cast<std::uint64_t>(Stream::kSyntheticLabels)}));

  std::vector<double> features(spec.n * spec.d);
  std::vector<Label> labels(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t c = i % spec.num_classes;
    const std::size_t axis = c % spec.d;
    const std::size_t block = c / spec.d;
    const double magnitude =
        (block % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(block / 2));
    for (std::size_t j = 0; j < spec.d; ++j) {
      const double mean = j == axis ? magnitude : 0.0;
      features[i * spec.d + j] = mean + spec.cluster_spread * feature_rng.Normal();
    }
    // Both draws happen for every row so that the label stream stays aligned
    // across label_noise settings.
    const double flip = label_rng.UniformOpen();
    const std::uint64_t other =
        label_rng.UniformInt(std::max<std::size_t>(spec.num_classes - 1, 1));
    Label label = static_cast<Label>(c);
    if (spec.num_classes > 1 && flip < spec.label_noise) {
      label = static_cast<Label>(other >= c ? other + 1 : other);
    }
    labels[i] = label;
  }
  return Dataset(spec.d, std::move(features), std::move(labels));
}

}  // namespace idg
