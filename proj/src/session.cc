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

#include "session.h"

#include "idg/errors.h"
#include "idg/random.h"

namespace idg::internal {

void ValidateSplit(const DatasetSplit& split) {
  if (split.train.empty()) throw ArgumentError("training split is empty");
  if (split.validation.empty()) throw ArgumentError("validation split is empty");
  if (split.validation.dim() != split.train.dim()) {
    throw ArgumentError("train and validation dimensions differ");
  }
}

GameSession::GameSession(const DatasetSplit& split, const DUPolicy& policy,
                         const KnnOptions& knn, std::uint64_t seed,
                         BudgetLedger ledger)
    : train_(split.train),
      release_{policy.eps_per_feature, ComputeFeatureBounds(split.train)},
      ledger_(std::move(ledger)),
      centers_(split.train.dim()),
      evaluator_(split.validation, split.train.ids(), split.train.labels(),
                 knn.k, knn.metric),
      seed_(seed) {}

void GameSession::Query(std::size_t row) {
  const PointId id = train_.id(row);
  ledger_.Charge(id);
  Rng rng(ReleaseSeed(seed_, id, ledger_.Queries(id)));
  const auto values = NoisyRelease(train_.row(row), release_, rng);
  centers_.Update(id, values);
  evaluator_.SetPoint(row, centers_.Center(id));
}

RunResult GameSession::Finish(RunTrace trace, std::vector<double> q_values,
                              std::vector<PointId> final_selection) && {
  return RunResult{std::move(trace), std::move(ledger_), std::move(centers_),
                   std::move(q_values), std::move(final_selection)};
}

}  // namespace idg::internal
