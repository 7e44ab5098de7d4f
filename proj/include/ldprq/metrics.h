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

#ifndef LDPRQ_METRICS_H_
#define LDPRQ_METRICS_H_

#include <span>
#include <vector>

#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

// Fraction of records inside every interval of q. Throws
// std::invalid_argument on an empty record set.
double TrueFrequency(std::span<const Record> records, const RangeQuery& q);
double TrueFrequency(std::span<const int> values, Interval q);

// `count` queries over `dims_query` of `dims_total` attributes. Each
// interval has a uniform center in [0, c) and a uniform length in
// [c/8, 3c/8], clipped to the domain.
std::vector<RangeQuery> GenQueries(int count, int domain, int dims_total, int dims_query, Rng& rng);

// (f_poisoned - f_true) / rho. Throws std::invalid_argument when rho <= 0.
double Efficiency(double f_true, double f_poisoned, double rho);

// Per-item MGA efficiency ceiling on OUE: 2 e^eps / (e^eps - 1).
double MgaEfficiencyBound(double epsilon);

// (p/q)^2 with p = e^eps/(e^eps+1), q = 1/(e^eps+1).
double PrismViolationRatio(double epsilon);

// Range-based randomized response over a d-value domain: bit i is 1 when
// i <= value, and each bit is kept with probability e^eps/(e^eps+1).
std::vector<int> RrrEncode(int value, int d);
// Exact probability that `value` is reported as `outcome`.
double RrrOutcomeProbability(int value, std::span<const int> outcome, double epsilon);

}  // namespace ldprq

#endif  // LDPRQ_METRICS_H_
