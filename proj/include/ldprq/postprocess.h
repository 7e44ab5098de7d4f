// Copyright 2026 The ldprq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPRQ_POSTPROCESS_H_
#define LDPRQ_POSTPROCESS_H_

#include <span>

#include "ldprq/grid.h"
#include "ldprq/tree.h"
#include "ldprq/types.h"

namespace ldprq {

struct NormSubResult {
  FrequencyVector normalized;
  double delta = 0.0;
};

// Finds delta with sum_i max(f_i - delta, 0) = 1 and clips. Sort-and-scan,
// O(n log n). Throws std::invalid_argument on an empty or non-finite input.
NormSubResult NormSub(std::span<const double> freqs);

// Bottom-up: leaves keep f_hat; an internal node gets lambda * f_hat +
// (1 - lambda) * sum(children f_tilde) with lambda from ConsistencyWeight.
void ApplyTreeConsistency(DecompositionTree& tree);
DecompositionTree TreeConsistency(DecompositionTree tree);

// One pass of cross-grid consistency. Grid totals are first equalized to
// their mean, then for each attribute (ascending) and fraction j the
// per-grid fraction sums are replaced by their 1/S-weighted average, the
// difference spread evenly over each grid's contributing cells.
void ApplyGridConsistency(GridSet& grids);
GridSet GridConsistency(GridSet grids);

}  // namespace ldprq

#endif  // LDPRQ_POSTPROCESS_H_
