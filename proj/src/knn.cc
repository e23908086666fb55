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

#include "idg/knn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "idg/errors.h"
#include "idg/io.h"
#include "idg/random.h"

namespace idg {

DistanceMetric ParseDistanceMetric(std::string_view name) {
  if (name == "l2") return DistanceMetric::kL2;
  if (name == "cosine") return DistanceMetric::kCosine;
  throw ArgumentError("unknown distance metric: " + std::string(name));
}

std::string_view ToString(DistanceMetric metric) {
  return metric == DistanceMetric::kL2 ? "l2" : "cosine";
}

std::string_view ToString(ValuationMethod method) {
  return method == ValuationMethod::kExactKnn ? "exact_knn" : "monte_carlo";
}

double Distance(std::span<const double> a, std::span<const double> b,
                DistanceMetric metric) {
  if (metric == DistanceMetric::kL2) {
    double sq = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double diff = a[j] - b[j];
      sq += diff * diff;
    }
    return sq;
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    dot += a[j] * b[j];
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  if (na == 0 || nb == 0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

struct Candidate {
  double dist;
  PointId id;
  std::size_t row;
};

bool Closer(const Candidate& a, const Candidate& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

// Sorts the `limit` nearest candidates to the front; returns how many.
std::size_t SelectNearest(std::vector<Candidate>& cands, std::size_t limit) {
  const std::size_t m = std::min(limit, cands.size());
  if (m == 0) return 0;
  if (m < cands.size()) {
    std::nth_element(cands.begin(), cands.begin() + (m - 1), cands.end(),
                     Closer);
    std::sort(cands.begin(), cands.begin() + m, Closer);
  } else {
    std::sort(cands.begin(), cands.end(), Closer);
  }
  return m;
}

// label_at(i) is the label of the i-th nearest neighbor.
template <typename LabelAt>
Label MajorityVote(std::size_t m, LabelAt label_at) {
  // k is small; a linear scan beats a hash map here.
  std::vector<std::pair<Label, std::size_t>> counts;
  for (std::size_t i = 0; i < m; ++i) {
    const Label l = label_at(i);
    auto it = std::find_if(counts.begin(), counts.end(),
                           [l](const auto& c) { return c.first == l; });
    if (it == counts.end()) {
      counts.emplace_back(l, 1);
    } else {
      ++it->second;
    }
  }
  std::size_t best = 0;
  for (const auto& c : counts) best = std::max(best, c.second);
  for (std::size_t i = 0; i < m; ++i) {
    const Label l = label_at(i);
    for (const auto& c : counts) {
      if (c.first == l && c.second == best) return l;
    }
  }
  return label_at(0);
}

void CheckQuery(const TrainView& view, std::span<const double> query) {
  if (query.size() != view.data().dim()) {
    throw ArgumentError("query has dimension " + std::to_string(query.size()) +
                        ", train has " + std::to_string(view.data().dim()));
  }
}

void CheckK(std::size_t k) {
  if (k < 1) throw ArgumentError("k must be at least 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainView

TrainView::TrainView(Dataset data, DistanceMetric metric)
    : data_(std::move(data)),
      active_(data_.size(), 1),
      active_count_(data_.size()),
      metric_(metric) {}

TrainView::TrainView(Dataset data, std::span<const PointId> active_ids,
                     DistanceMetric metric)
    : data_(std::move(data)), active_(data_.size(), 0), metric_(metric) {
  std::unordered_map<PointId, std::size_t> index;
  for (std::size_t i = 0; i < data_.size(); ++i) index.emplace(data_.id(i), i);
  for (PointId id : active_ids) {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw ArgumentError("active id " + std::to_string(id) +
                          " is not a training point");
    }
    if (!active_[it->second]) {
      active_[it->second] = 1;
      ++active_count_;
    }
  }
}

std::vector<PointId> TrainView::ActiveIds() const {
  std::vector<PointId> ids;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (active_[i]) ids.push_back(data_.id(i));
  }
  return ids;
}

std::vector<std::size_t> NearestActive(const TrainView& view,
                                       std::span<const double> query,
                                       std::size_t limit) {
  CheckQuery(view, query);
  const Dataset& data = view.data();
  std::vector<Candidate> cands;
  cands.reserve(view.active_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!view.active(i)) continue;
    cands.push_back({Distance(query, data.row(i), view.metric()), data.id(i), i});
  }
  const std::size_t m = SelectNearest(cands, limit);
  std::vector<std::size_t> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = cands[i].row;
  return rows;
}

Label KnnPredict(const TrainView& view, std::span<const double> query,
                 std::size_t k) {
  CheckK(k);
  if (view.active_count() == 0) throw NoNeighborsError("no active neighbors");
  const auto rows = NearestActive(view, query, k);
  return MajorityVote(rows.size(),
                      [&](std::size_t i) { return view.data().label(rows[i]); });
}

namespace {

std::vector<Label> PredictAll(const TrainView& view, const Dataset& eval_set,
                              std::size_t k) {
  if (eval_set.empty()) throw ArgumentError("evaluation set is empty");
  std::vector<Label> preds(eval_set.size());
  for (std::size_t e = 0; e < eval_set.size(); ++e) {
    preds[e] = KnnPredict(view, eval_set.row(e), k);
  }
  return preds;
}

}  // namespace

double EvaluateUtility(const TrainView& view, const Dataset& eval_set,
                       std::size_t k) {
  const auto preds = PredictAll(view, eval_set, k);
  std::size_t correct = 0;
  for (std::size_t e = 0; e < preds.size(); ++e) {
    correct += preds[e] == eval_set.label(e);
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double MacroF1(const TrainView& view, const Dataset& eval_set, std::size_t k) {
  const auto preds = PredictAll(view, eval_set, k);
  struct Tally {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<Label, Tally> tallies;
  for (std::size_t e = 0; e < preds.size(); ++e) {
    const Label truth = eval_set.label(e);
    if (preds[e] == truth) {
      ++tallies[truth].tp;
    } else {
      ++tallies[preds[e]].fp;
      ++tallies[truth].fn;
    }
  }
  double total = 0;
  for (const auto& [label, t] : tallies) {
    const double denom = 2.0 * t.tp + t.fp + t.fn;
    total += denom > 0 ? 2.0 * t.tp / denom : 0.0;
  }
  return total / static_cast<double>(tallies.size());
}

double LabelAgreement(const TrainView& view, PointId id, std::size_t k) {
  CheckK(k);
  const Dataset& data = view.data();
  const std::size_t self = data.IndexOf(id);
  if (self == data.size() || !view.active(self)) {
    throw ArgumentError("point " + std::to_string(id) + " is not active");
  }
  if (view.active_count() < 2) {
    throw NoNeighborsError("label agreement needs another active point");
  }
  const auto query = data.row(self);
  std::vector<Candidate> cands;
  cands.reserve(view.active_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i == self || !view.active(i)) continue;
    cands.push_back({Distance(query, data.row(i), view.metric()), data.id(i), i});
  }
  const std::size_t m = SelectNearest(cands, k);
  std::size_t same = 0;
  for (std::size_t i = 0; i < m; ++i) same += data.label(cands[i].row) == data.label(self);
  return static_cast<double>(same) / static_cast<double>(m);
}

double SoftVoteValue(const TrainView& view, std::span<const double> query,
                     Label label, std::size_t k) {
  CheckK(k);
  const auto rows = NearestActive(view, query, k);
  std::size_t match = 0;
  for (std::size_t r : rows) match += view.data().label(r) == label;
  return static_cast<double>(match) / static_cast<double>(k);
}

// ---------------------------------------------------------------------------
// Valuation

double ValuationVector::Sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

double ValuationVector::ValueOf(PointId id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return values[i];
  }
  throw ArgumentError("no value for point " + std::to_string(id));
}

std::string ValuationVector::ToCsv() const {
  std::string out = "id,value,method\n";
  const std::string_view m = ToString(method);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += std::to_string(ids[i]);
    out += ',';
    out += FormatDouble(values[i]);
    out += ',';
    out += m;
    out += '\n';
  }
  return out;
}

std::vector<double> ExactKnnShapleyFromDistances(
    std::span<const double> dist, std::span<const PointId> order_key,
    std::span<const Label> labels, Label query_label, std::size_t k) {
  CheckK(k);
  const std::size_t n = dist.size();
  if (n == 0) throw ArgumentError("exact kNN Shapley needs training points");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && order_key[a] < order_key[b]);
  });
  const double kd = static_cast<double>(k);
  auto match = [&](std::size_t rank) {
    return labels[order[rank]] == query_label ? 1.0 : 0.0;
  };
  std::vector<double> values(n);
  // 1/N for N >= k. Below k the value is additive, so every point is worth
  // its own match over k.
  double s = match(n - 1) / std::max(static_cast<double>(n), kd);
  values[order[n - 1]] = s;
  // Rank r here is 0-based; the 1-based position is r + 1.
  for (std::size_t r = n - 1; r-- > 0;) {
    const double pos = static_cast<double>(r + 1);
    s += (match(r) - match(r + 1)) / kd * std::min(kd, pos) / pos;
    values[order[r]] = s;
  }
  return values;
}

std::vector<double> ExactKnnShapleyForQuery(const TrainView& view,
                                            std::span<const double> query,
                                            Label label, std::size_t k) {
  CheckQuery(view, query);
  const Dataset& data = view.data();
  std::vector<double> dist(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    dist[i] = Distance(query, data.row(i), view.metric());
  }
  return ExactKnnShapleyFromDistances(dist, data.ids(), data.labels(), label, k);
}

ValuationVector ExactKnnShapley(const TrainView& view, const Dataset& eval_set,
                                std::size_t k) {
  if (view.data().empty()) throw ArgumentError("training set is empty");
  if (eval_set.empty()) throw ArgumentError("evaluation set is empty");
  if (view.active_count() != view.data().size()) {
    throw ArgumentError("exact kNN Shapley needs every training point active");
  }
  ValuationVector out;
  out.ids = view.data().ids();
  out.values.assign(view.data().size(), 0.0);
  out.method = ValuationMethod::kExactKnn;
  out.eval_size = eval_set.size();
  for (std::size_t e = 0; e < eval_set.size(); ++e) {
    const auto s = ExactKnnShapleyForQuery(view, eval_set.row(e),
                                           eval_set.label(e), k);
    for (std::size_t i = 0; i < s.size(); ++i) out.values[i] += s[i];
  }
  for (double& v : out.values) v /= static_cast<double>(eval_set.size());
  return out;
}

namespace {

// Incrementally maintained k-nearest list for one evaluation point.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void Clear() { items_.clear(); }

  // Returns false when the candidate does not enter the list.
  bool Offer(const Candidate& c) {
    if (items_.size() == k_ && !Closer(c, items_.back())) return false;
    auto it = std::upper_bound(items_.begin(), items_.end(), c, Closer);
    items_.insert(it, c);
    if (items_.size() > k_) items_.pop_back();
    return true;
  }

  const std::vector<Candidate>& items() const { return items_; }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

}  // namespace

ValuationVector MonteCarloShapley(const TrainView& view,
                                  const Dataset& eval_set, std::size_t k,
                                  const MonteCarloOptions& options) {
  CheckK(k);
  if (eval_set.empty()) throw ArgumentError("evaluation set is empty");
  const Dataset& data = view.data();
  std::vector<std::size_t> players;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (view.active(i)) players.push_back(i);
  }
  const std::size_t n = players.size();
  if (options.exhaustive && n > kMaxExhaustivePoints) {
    throw ArgumentError("exhaustive Shapley supports at most " +
                        std::to_string(kMaxExhaustivePoints) + " points, got " +
                        std::to_string(n));
  }
  if (!options.exhaustive && options.num_permutations == 0) {
    throw ArgumentError("num_permutations must be positive");
  }

  const std::size_t num_eval = eval_set.size();
  // dist[e * n + p] for player p.
  std::vector<double> dist(num_eval * n);
  for (std::size_t e = 0; e < num_eval; ++e) {
    for (std::size_t p = 0; p < n; ++p) {
      dist[e * n + p] =
          Distance(eval_set.row(e), data.row(players[p]), view.metric());
    }
  }

  std::vector<TopK> lists(num_eval, TopK(k));
  std::vector<double> point_value(num_eval, 0.0);
  auto value_of = [&](std::size_t e) {
    const auto& items = lists[e].items();
    if (items.empty()) return 0.0;
    const Label y = eval_set.label(e);
    if (options.value == ValueFunction::kSoftVote) {
      std::size_t match = 0;
      for (const auto& c : items) match += data.label(c.row) == y;
      return static_cast<double>(match) / static_cast<double>(k);
    }
    const Label pred = MajorityVote(
        items.size(), [&](std::size_t i) { return data.label(items[i].row); });
    return pred == y ? 1.0 : 0.0;
  };

  std::vector<double> totals(n, 0.0);
  std::uint64_t num_perms = 0;
  auto walk = [&](std::span<const std::size_t> perm) {
    for (auto& l : lists) l.Clear();
    std::fill(point_value.begin(), point_value.end(), 0.0);
    double prev = 0.0;
    for (std::size_t p : perm) {
      double cur = prev;
      for (std::size_t e = 0; e < num_eval; ++e) {
        if (lists[e].Offer({dist[e * n + p], data.id(players[p]), players[p]})) {
          const double v = value_of(e);
          cur += v - point_value[e];
          point_value[e] = v;
        }
      }
      totals[p] += cur - prev;
      prev = cur;
    }
    ++num_perms;
  };

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  if (options.exhaustive) {
    do {
      walk(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    Rng rng(DeriveSeed(options.seed,
                       {static_cast<std::uint64_t>(Stream::kMonteCarlo)}));
    for (std::size_t s = 0; s < options.num_permutations; ++s) {
      rng.Shuffle(perm);
      walk(perm);
    }
  }

  ValuationVector out;
  out.method = ValuationMethod::kMonteCarlo;
  out.eval_size = num_eval;
  out.ids.reserve(n);
  out.values.reserve(n);
  const double denom = static_cast<double>(num_perms) * static_cast<double>(num_eval);
  for (std::size_t p = 0; p < n; ++p) {
    out.ids.push_back(data.id(players[p]));
    out.values.push_back(totals[p] / denom);
  }
  return out;
}

// ---------------------------------------------------------------------------
// KnnEvaluator

KnnEvaluator::KnnEvaluator(const Dataset& eval_set,
                           std::span<const PointId> train_ids,
                           std::span<const Label> train_labels, std::size_t k,
                           DistanceMetric metric)
    : eval_(eval_set),
      eval_labels_(eval_set.labels()),
      train_ids_(train_ids.begin(), train_ids.end()),
      train_labels_(train_labels.begin(), train_labels.end()),
      k_(k),
      metric_(metric),
      dist_(eval_set.size() * train_ids.size(),
            std::numeric_limits<double>::infinity()),
      active_(train_ids.size(), 0),
      nearest_(eval_set.size()),
      correct_(eval_set.size(), 0) {
  CheckK(k);
  if (train_ids.size() != train_labels.size()) {
    throw ArgumentError("train ids and labels differ in length");
  }
  for (auto& list : nearest_) list.reserve(k + 1);
}

bool KnnEvaluator::InList(std::size_t eval, std::size_t row) const {
  for (const auto& nb : nearest_[eval]) {
    if (nb.row == row) return true;
  }
  return false;
}

void KnnEvaluator::Rescore(std::size_t eval) {
  const auto& list = nearest_[eval];
  char ok = 0;
  if (!list.empty()) {
    const Label pred = MajorityVote(
        list.size(), [&](std::size_t i) { return train_labels_[list[i].row]; });
    ok = pred == eval_labels_[eval] ? 1 : 0;
  }
  if (ok != correct_[eval]) {
    ok ? ++correct_count_ : --correct_count_;
    correct_[eval] = ok;
  }
}

void KnnEvaluator::Rescan(std::size_t eval) {
  const std::size_t n = train_ids_.size();
  const double* d = RowDistances(eval);
  std::vector<Candidate> cands;
  cands.reserve(active_count_);
  for (std::size_t i = 0; i < n; ++i) {
    if (active_[i]) cands.push_back({d[i], train_ids_[i], i});
  }
  const std::size_t m = SelectNearest(cands, k_);
  auto& list = nearest_[eval];
  list.clear();
  for (std::size_t i = 0; i < m; ++i) {
    list.push_back({cands[i].dist, cands[i].id, cands[i].row});
  }
  Rescore(eval);
}

void KnnEvaluator::Offer(std::size_t eval, std::size_t row) {
  const Neighbor cand{RowDistances(eval)[row], train_ids_[row], row};
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  };
  auto& list = nearest_[eval];
  if (list.size() == k_ && !closer(cand, list.back())) return;
  list.insert(std::upper_bound(list.begin(), list.end(), cand, closer), cand);
  if (list.size() > k_) list.pop_back();
  Rescore(eval);
}

void KnnEvaluator::SetPoint(std::size_t row, std::span<const double> x) {
  if (row >= train_ids_.size()) throw ArgumentError("row out of range");
  if (x.size() != eval_.dim()) throw ArgumentError("point dimension mismatch");
  const std::size_t n = train_ids_.size();
  for (std::size_t e = 0; e < eval_.size(); ++e) {
    dist_[e * n + row] = Distance(eval_.row(e), x, metric_);
    if (!active_[row]) continue;
    // A listed row that moves may now be beaten by an unlisted one.
    if (InList(e, row)) {
      Rescan(e);
    } else {
      Offer(e, row);
    }
  }
}

void KnnEvaluator::SetActive(std::size_t row, bool active) {
  if (row >= train_ids_.size()) throw ArgumentError("row out of range");
  if (static_cast<bool>(active_[row]) == active) return;
  active_[row] = active ? 1 : 0;
  active ? ++active_count_ : --active_count_;
  for (std::size_t e = 0; e < eval_.size(); ++e) {
    if (active) {
      Offer(e, row);
    } else if (InList(e, row)) {
      Rescan(e);
    }
  }
}

void KnnEvaluator::SetActiveRows(std::span<const std::size_t> rows) {
  std::fill(active_.begin(), active_.end(), 0);
  active_count_ = 0;
  for (std::size_t r : rows) {
    if (r >= train_ids_.size()) throw ArgumentError("row out of range");
    if (!active_[r]) {
      active_[r] = 1;
      ++active_count_;
    }
  }
  for (std::size_t e = 0; e < eval_.size(); ++e) Rescan(e);
}

double KnnEvaluator::Accuracy() const {
  if (active_count_ == 0 || eval_.empty()) return 0.0;
  return static_cast<double>(correct_count_) / static_cast<double>(eval_.size());
}

std::vector<double> KnnEvaluator::ExactShapley() const {
  const std::size_t n = train_ids_.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t e = 0; e < eval_.size(); ++e) {
    const auto s = ExactKnnShapleyFromDistances(
        std::span<const double>(RowDistances(e), n), train_ids_, train_labels_,
        eval_labels_[e], k_);
    for (std::size_t i = 0; i < n; ++i) total[i] += s[i];
  }
  for (double& v : total) v /= static_cast<double>(eval_.size());
  return total;
}

}  // namespace idg
