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

#ifndef IDG_METRICS_H_
#define IDG_METRICS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "idg/trace.h"

namespace idg {

// Gini coefficient sum_i sum_j |x_i - x_j| / (2 n^2 mean) of a non-negative
// allocation. Throws UndefinedMetricError when every value is zero.
double Gini(std::span<const double> values);

// Fractional ranks (1-based); tied values share their average rank.
std::vector<double> FractionalRanks(std::span<const double> values);

// Pearson correlation of fractional ranks. Throws UndefinedMetricError when
// either input is constant.
double Spearman(std::span<const double> a, std::span<const double> b);

struct CurveSeries {
  std::vector<double> x;
  std::vector<double> y_mean;
  std::vector<double> y_std;  // population standard deviation
  std::string label;
};

// Per-iteration mean and standard deviation of utility across traces,
// truncated to the shortest trace. x values come from the first trace.
CurveSeries AggregateCurves(std::span<const RunTrace> traces,
                            std::string label = "utility");

// `x,y_mean,y_std,label` with a header line.
std::string CurvesToCsv(std::span<const CurveSeries> curves);
void ExportCurves(std::span<const CurveSeries> curves,
                  const std::filesystem::path& path);

}  // namespace idg

#endif  // IDG_METRICS_H_
