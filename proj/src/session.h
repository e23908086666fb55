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

// Per-run state shared by the game loops: ledger, release mechanism, centers
// and the validation evaluator. Internal to the library.

#ifndef IDG_SRC_SESSION_H_
#define IDG_SRC_SESSION_H_

#include <cstdint>
#include <vector>

#include "idg/dataset.h"
#include "idg/denoiser.h"
#include "idg/knn.h"
#include "idg/policy.h"
#include "idg/release.h"

namespace idg::internal {

class GameSession {
 public:
  GameSession(const DatasetSplit& split, const DUPolicy& policy,
              const KnnOptions& knn, std::uint64_t seed, BudgetLedger ledger);

  const Dataset& train() const { return train_; }
  std::size_t size() const { return train_.size(); }

  bool CanQuery(std::size_t row) const { return ledger_.CanCharge(train_.id(row)); }

  // Charges the ledger, draws the release from the (seed, id, query index)
  // substream and folds it into the point's center. The evaluator sees the
  // new center.
  void Query(std::size_t row);

  KnnEvaluator& evaluator() { return evaluator_; }
  const BudgetLedger& ledger() const { return ledger_; }
  const CenterTable& centers() const { return centers_; }
  double charge() const { return ledger_.charge_per_query(); }

  RunResult Finish(RunTrace trace, std::vector<double> q_values,
                   std::vector<PointId> final_selection) &&;

 private:
  const Dataset& train_;
  ReleaseConfig release_;
  BudgetLedger ledger_;
  CenterTable centers_;
  KnnEvaluator evaluator_;
  std::uint64_t seed_;
};

void ValidateSplit(const DatasetSplit& split);

}  // namespace idg::internal

#endif  // IDG_SRC_SESSION_H_
