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

// Optimized Unary Encoding: one-hot vectors with asymmetric bit flipping.

#ifndef LDPRQ_OUE_H_
#define LDPRQ_OUE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

struct OueParams {
  double epsilon = 1.0;
  int n = 1;         // vector length
  double p = 0.5;    // Pr[true bit reported as 1]
  double q = 0.0;    // Pr[other bit reported as 1]

  // p = 1/2, q = 1/(e^eps + 1). Throws std::invalid_argument unless
  // epsilon > 0 and n >= 1.
  static OueParams Make(double epsilon, int n);
};

struct OueReport {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  int CountOnes() const;
};

OueReport OuePerturb(int true_index, const OueParams& params, Rng& rng);

// Adds a report's bits into per-item counts.
void AccumulateOue(const OueReport& report, std::span<std::int64_t> counts);

// f_v = (count_v - N q) / (N (p - q)).
FrequencyVector OueEstimateFromCounts(std::span<const std::int64_t> counts,
                                      std::int64_t num_reports, const OueParams& params);

// Throws std::invalid_argument on an empty report set or a length mismatch.
FrequencyVector OueAggregate(std::span<const OueReport> reports, const OueParams& params);

// Analytic standard deviation of one OUE estimate of a (near-zero) frequency
// from `num_reports` users: sqrt(q(1-q) / (N (p-q)^2)).
double OueStddev(const OueParams& params, std::int64_t num_reports);

}  // namespace ldprq

#endif  // LDPRQ_OUE_H_
