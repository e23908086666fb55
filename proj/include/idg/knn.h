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

// kNN classification and kNN data valuation.
//
// Neighbor order everywhere is (distance, point id) ascending, so results do
// not depend on the storage order of the training rows.
//
// Two value functions coexist:
//  * the soft-vote value v(S) = (1/k) * #{j <= min(k, |S|) : y_(j) = y},
//    for which the exact Shapley recursion holds;
//  * plain accuracy of the majority-vote prediction, used as the game's
//    utility target.
// Both take v(empty set) = 0.

#ifndef IDG_KNN_H_
#define IDG_KNN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idg/dataset.h"

namespace idg {

enum class DistanceMetric { kL2, kCosine };

DistanceMetric ParseDistanceMetric(std::string_view name);
std::string_view ToString(DistanceMetric metric);

// Ordering key: squared L2 or 1 - cosine similarity. A zero vector has cosine
// distance 1 to everything.
double Distance(std::span<const double> a, std::span<const double> b,
                DistanceMetric metric);

// Training rows (originals or denoised centers) plus the subset of them that
// may serve as neighbors.
class TrainView {
 public:
  // All rows active.
  explicit TrainView(Dataset data, DistanceMetric metric = DistanceMetric::kL2);
  // Only the listed ids are active. Unknown ids are an ArgumentError.
  TrainView(Dataset data, std::span<const PointId> active_ids,
            DistanceMetric metric = DistanceMetric::kL2);

  const Dataset& data() const { return data_; }
  DistanceMetric metric() const { return metric_; }
  bool active(std::size_t row) const { return active_[row] != 0; }
  std::size_t active_count() const { return active_count_; }
  std::vector<PointId> ActiveIds() const;

 private:
  Dataset data_;
  std::vector<char> active_;
  std::size_t active_count_ = 0;
  DistanceMetric metric_;
};

// Rows of the active neighbors of `query`, nearest first, at most `limit`.
std::vector<std::size_t> NearestActive(const TrainView& view,
                                       std::span<const double> query,
                                       std::size_t limit);

// Majority label among the min(k, |active|) nearest active points. A tie
// between classes goes to the class of the nearest point among them.
Label KnnPredict(const TrainView& view, std::span<const double> query,
                 std::size_t k);

// Fraction of eval points predicted correctly.
double EvaluateUtility(const TrainView& view, const Dataset& eval_set,
                       std::size_t k);

// Unweighted mean of per-class F1 over classes seen in either predictions or
// truth; a class with no true positives scores 0.
double MacroF1(const TrainView& view, const Dataset& eval_set, std::size_t k);

// Fraction of the min(k, |active| - 1) nearest other active points that share
// the label of point `id`.
double LabelAgreement(const TrainView& view, PointId id, std::size_t k);

// Soft-vote value of the active set for one labeled query.
double SoftVoteValue(const TrainView& view, std::span<const double> query,
                     Label label, std::size_t k);

enum class ValuationMethod { kExactKnn, kMonteCarlo };

std::string_view ToString(ValuationMethod method);

struct ValuationVector {
  std::vector<PointId> ids;
  std::vector<double> values;
  ValuationMethod method = ValuationMethod::kExactKnn;
  std::size_t eval_size = 0;

  double Sum() const;
  // Value of `id`; throws ArgumentError when absent.
  double ValueOf(PointId id) const;
  // `id,value,method` rows in stored order.
  std::string ToCsv() const;
};

// Exact kNN Shapley values (soft-vote value) of every training row for one
// labeled query, in row order. Ignores the active mask: all rows play.
std::vector<double> ExactKnnShapleyForQuery(const TrainView& view,
                                            std::span<const double> query,
                                            Label label, std::size_t k);

// Same recursion from precomputed distances; `order_key` breaks distance ties
// (ascending) and `labels` are the training labels.
std::vector<double> ExactKnnShapleyFromDistances(std::span<const double> dist,
                                                 std::span<const PointId> order_key,
                                                 std::span<const Label> labels,
                                                 Label query_label,
                                                 std::size_t k);

// Mean of ExactKnnShapleyForQuery over the evaluation set. Requires every
// training row to be active.
ValuationVector ExactKnnShapley(const TrainView& view, const Dataset& eval_set,
                                std::size_t k);

enum class ValueFunction {
  kAccuracy,   // majority-vote accuracy (the game utility)
  kSoftVote,   // fraction of the k nearest labels that match
};

struct MonteCarloOptions {
  // Enumerate all N! permutations; exact. Requires N <= 9.
  bool exhaustive = false;
  std::size_t num_permutations = 1000;
  std::uint64_t seed = 0;
  ValueFunction value = ValueFunction::kAccuracy;
};

inline constexpr std::size_t kMaxExhaustivePoints = 9;

// Permutation-sampling Shapley estimate over the active rows, averaged over
// the evaluation set. Inactive rows get no entry.
ValuationVector MonteCarloShapley(const TrainView& view,
                                  const Dataset& eval_set, std::size_t k,
                                  const MonteCarloOptions& options);

// Eval x train distance cache with incrementally maintained k-nearest lists,
// for repeated utility evaluation while training rows move (denoised centers)
// or enter and leave the active set. Rows start inactive at infinite distance.
class KnnEvaluator {
 public:
  KnnEvaluator(const Dataset& eval_set, std::span<const PointId> train_ids,
               std::span<const Label> train_labels, std::size_t k,
               DistanceMetric metric = DistanceMetric::kL2);

  std::size_t train_size() const { return train_ids_.size(); }
  std::size_t eval_size() const { return eval_labels_.size(); }
  std::size_t k() const { return k_; }

  // Sets the coordinates of training row `row` and recomputes its distances.
  void SetPoint(std::size_t row, std::span<const double> x);
  void SetActive(std::size_t row, bool active);
  // Replaces the whole active set.
  void SetActiveRows(std::span<const std::size_t> rows);
  bool active(std::size_t row) const { return active_[row] != 0; }
  std::size_t active_count() const { return active_count_; }

  // Accuracy of the active set on the evaluation set; 0 when nothing is
  // active.
  double Accuracy() const;

  // Exact Shapley values averaged over the evaluation set, over every
  // training row regardless of the active mask.
  std::vector<double> ExactShapley() const;

 private:
  struct Neighbor {
    double dist;
    PointId id;
    std::size_t row;
  };

  const double* RowDistances(std::size_t eval) const {
    return dist_.data() + eval * train_ids_.size();
  }
  void Rescan(std::size_t eval);
  void Offer(std::size_t eval, std::size_t row);
  bool InList(std::size_t eval, std::size_t row) const;
  void Rescore(std::size_t eval);

  Dataset eval_;
  std::vector<Label> eval_labels_;
  std::vector<PointId> train_ids_;
  std::vector<Label> train_labels_;
  std::size_t k_;
  DistanceMetric metric_;
  std::vector<double> dist_;  // eval-major: dist_[e * n_train + i]
  std::vector<char> active_;
  std::size_t active_count_ = 0;
  std::vector<std::vector<Neighbor>> nearest_;  // per eval point, sorted
  std::vector<char> correct_;
  std::size_t correct_count_ = 0;
};

}  // namespace idg

#endif  // IDG_KNN_H_
