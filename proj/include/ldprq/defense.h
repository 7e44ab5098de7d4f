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

// Hypothesis-test detectors: a 1s-count outlier test for OUE rounds and a
// maximum-load test for OLH rounds.

#ifndef LDPRQ_DEFENSE_H_
#define LDPRQ_DEFENSE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldprq/olh.h"
#include "ldprq/oue.h"
#include "ldprq/random.h"

namespace ldprq {

struct DetectionResult {
  bool detected = false;
  double statistic = 0.0;
  double threshold = 0.0;
};

// Exact CDF of Bin(n-1, q) + Bin(1, 1/2); entry x is Pr[X <= x], x in [0, n].
std::vector<double> OnesCountCdf(int n, double q);

// Phi^{-1}(p) for p in (0, 1).
double InverseNormalCdf(double p);

// (1 - sqrt(1 / (1 + z^2))) / 2.
double OutsideMass(double z);

enum class TailMass {
  kNominal,  // the threshold uses the closed-form outside mass
  kExact,    // the threshold uses the honest mass actually outside [I-, I+]
  kInside,   // the closed form is read as the mass inside [I-, I+]
};

struct TreeDefenseParams {
  double alpha = 0.005;
  TailMass tail = TailMass::kNominal;
};

struct TreeDetection : DetectionResult {
  int lower = 0;            // I-
  int upper = 0;            // I+
  double outside_mass = 0;  // mass used in the threshold
};

// I- = largest x with F(x) <= f/2, I+ = smallest x with F(x) >= 1 - f/2.
// Statistic: users whose 1-count is below I- or above I+. Threshold:
// N f + z sqrt(N f (1 - f)).
TreeDetection TreeDetect(std::span<const int> ones_counts, int n, double q,
                         const TreeDefenseParams& params);
TreeDetection TreeDetect(std::span<const OueReport> reports, const OueParams& oue,
                         const TreeDefenseParams& params);

// Empirical CDF of the maximum bin occupancy: entry x is the fraction of
// trials with max load <= x. Throws std::invalid_argument when trials < 100
// or bins < 1.
std::vector<double> MaxLoadCdf(std::int64_t balls, std::int64_t bins, int trials, Rng& rng);

// 1000-trial CDF for (balls, bins), computed once per key from a fixed
// per-key seed. Thread-safe.
const std::vector<double>& CachedMaxLoadCdf(std::int64_t balls, std::int64_t bins);

// F(x), with F = 1 past the table.
double CdfAt(std::span<const double> cdf, std::int64_t x);

// Smallest load x with F(x) > 1 - alpha.
std::int64_t MaxLoadThreshold(std::int64_t balls, std::int64_t bins, double alpha);

struct GridDetection : DetectionResult {
  double analytic_guide = 0.0;  // log N / (log N - log |H|), metadata only
};

// Statistic: the largest number of users sharing a hash function. Detected
// iff F(statistic) > 1 - alpha; threshold is the largest load still passing.
GridDetection GridDetect(std::span<const HashPair> pairs, std::int64_t family_size, double alpha);

}  // namespace ldprq

#endif  // LDPRQ_DEFENSE_H_
