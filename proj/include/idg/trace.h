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

#ifndef IDG_TRACE_H_
#define IDG_TRACE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "idg/dataset.h"

namespace idg {

struct IterationRecord {
  std::uint64_t t = 0;
  // Points queried (and charged) in this iteration.
  std::vector<PointId> selected;
  // Validation utility after the iteration's releases.
  double utility = 0;
  double spend_this_iter = 0;
};

// One run of the disclosure game. total_spend equals
// charge_per_query * sum_t |selected_t|.
struct RunTrace {
  std::vector<IterationRecord> iterations;
  bool success = false;
  double total_spend = 0;
  double final_utility = 0;
  std::uint64_t seed = 0;

  // Index of the last recorded iteration (0 when none ran).
  std::uint64_t IterationsRun() const {
    return iterations.empty() ? 0 : iterations.back().t;
  }

  // `t,utility,spend` with spend = spend_this_iter.
  std::string ToCsv() const;
};

}  // namespace idg

#endif  // IDG_TRACE_H_
