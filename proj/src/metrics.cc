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

#include "idg/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "idg/errors.h"
#include "idg/io.h"

namespace idg {

std::string RunTrace::ToCsv() const {
  std::string out = "t,utility,spend\n";
  for (const auto& it : iterations) {
    out += std::to_string(it.t);
    out += ',';
    out += FormatDouble(it.utility);
    out += ',';
    out += FormatDouble(it.spend_this_iter);
    out += '\n';
  }
  return out;
}

double Gini(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("gini of an empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw ArgumentError("gini needs finite non-negative values");
    }
  }
  // Sorting first makes the sums independent of input order.
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (sum == 0) throw UndefinedMetricError("gini of an all-zero allocation");
  double pairwise = 0;
  for (double a : sorted) {
    for (double b : sorted) pairwise += std::abs(a - b);
  }
  const double mean = sum / n;
  return pairwise / (2.0 * n * n * mean);
}

std::vector<double> FractionalRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t r = i; r <= j; ++r) ranks[order[r]] = avg;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("spearman inputs differ in length");
  if (a.size() < 2) throw ArgumentError("spearman needs at least two points");
  const auto ra = FractionalRanks(a);
  const auto rb = FractionalRanks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) throw UndefinedMetricError("spearman of a constant vector");
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

CurveSeries AggregateCurves(std::span<const RunTrace> traces, std::string label) {
  if (traces.empty()) throw ArgumentError("no traces to aggregate");
  std::size_t len = traces[0].iterations.size();
  for (const auto& tr : traces) len = std::min(len, tr.iterations.size());
  CurveSeries curve;
  curve.label = std::move(label);
  curve.x.resize(len);
  curve.y_mean.resize(len);
  curve.y_std.resize(len);
  const double count = static_cast<double>(traces.size());
  for (std::size_t i = 0; i < len; ++i) {
    curve.x[i] = static_cast<double>(traces[0].iterations[i].t);
    double sum = 0;
    for (const auto& tr : traces) sum += tr.iterations[i].utility;
    const double mean = sum / count;
    double sq = 0;
    for (const auto& tr : traces) {
      const double diff = tr.iterations[i].utility - mean;
      sq += diff * diff;
    }
    curve.y_mean[i] = mean;
    curve.y_std[i] = std::sqrt(sq / count);
  }
  return curve;
}

std::string CurvesToCsv(std::span<const CurveSeries> curves) {
  std::string out = "x,y_mean,y_std,label\n";
  for (const auto& c : curves) {
    if (c.x.size() != c.y_mean.size() || c.x.size() != c.y_std.size()) {
      throw ArgumentError("curve '" + c.label + "' has ragged columns");
    }
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      out += FormatDouble(c.x[i]);
      out += ',';
      out += FormatDouble(c.y_mean[i]);
      out += ',';
      out += FormatDouble(c.y_std[i]);
      out += ',';
      out += c.label;
      out += '\n';
    }
  }
  return out;
}

void ExportCurves(std::span<const CurveSeries> curves,
                  const std::filesystem::path& path) {
  WriteFileAtomic(path, CurvesToCsv(curves));
}

}  // namespace idg
