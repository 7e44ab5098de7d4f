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

// Optimal Local Hashing over a linear congruential universal hash family.

#ifndef LDPRQ_OLH_H_
#define LDPRQ_OLH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

// h_{a,b}(x) = ((a x + b) mod P) mod g.
struct LinearHash {
  std::int64_t a = 0;
  std::int64_t b = 0;

  int Eval(std::int64_t x, std::int64_t prime, int g) const {
    return static_cast<int>(((a * x + b) % prime) % g);
  }
};

bool IsPrime(std::int64_t n);
std::int64_t NextPrimeAbove(std::int64_t n);

// The functions h_{a,b} with a, b in [0, P-1], enumerated as fn_id = a P + b
// and truncated to the first `size` ids. The full family is pairwise
// uniform: for x != y, (a x + b, a y + b) mod P is uniform over [P]^2, so two
// cells collide with probability sum_k n_k^2 / P^2 (n_k: residues mod P
// falling on key k), which is 1/g up to O(1/P^2).
class HashFamily {
 public:
  HashFamily() = default;
  // Throws std::invalid_argument if `prime` is not a prime larger than
  // `num_cells`, g < 2, or size is outside [1, P^2].
  HashFamily(std::int64_t prime, int g, std::int64_t size, int num_cells);
  // The full family for the smallest prime P > num_cells with
  // P^2 >= requested_size.
  static HashFamily ForCells(int num_cells, int g, std::int64_t requested_size);

  std::int64_t prime() const { return prime_; }
  int g() const { return g_; }
  std::int64_t size() const { return size_; }
  int num_cells() const { return num_cells_; }

  LinearHash Function(std::int64_t fn_id) const;
  // Throws std::out_of_range for a bad fn_id or a cell outside [0, P).
  int Eval(std::int64_t fn_id, int cell) const;

 private:
  std::int64_t prime_ = 2;
  int g_ = 2;
  std::int64_t size_ = 0;
  int num_cells_ = 0;
};

struct HashPair {
  std::int64_t fn_id = 0;
  int key = 0;

  friend bool operator==(const HashPair&, const HashPair&) = default;
};

struct OlhParams {
  double epsilon = 1.0;
  int g = 2;       // round(e^eps + 1)
  double q = 0.5;  // aggregation constant 1/g

  static OlhParams Make(double epsilon);
};

HashPair OlhPerturb(int true_cell, const HashFamily& family, const OlhParams& params, Rng& rng);

// Cells c in `cells` with h(c) == key.
std::vector<int> OlhSupport(const HashPair& pair, const HashFamily& family,
                            std::span<const int> cells);
// Same, for an explicit function.
std::vector<int> SupportOf(const LinearHash& fn, int key, std::int64_t prime, int g,
                           std::span<const int> cells);

// Adds 1 to counts[c] for every cell in the pair's support over [0, counts.size()).
void AccumulateOlh(const HashPair& pair, const HashFamily& family, std::span<std::int64_t> counts);

// f_v = (count_v - N/g) / (N (1/2 - 1/g)).
FrequencyVector OlhEstimateFromCounts(std::span<const std::int64_t> counts,
                                      std::int64_t num_reports, const OlhParams& params);

// Support counts over cells [0, family.num_cells()), then the estimator above.
// Throws std::invalid_argument on empty input.
FrequencyVector OlhAggregate(std::span<const HashPair> pairs, const HashFamily& family,
                             const OlhParams& params);

double OlhStddev(const OlhParams& params, std::int64_t num_reports);

}  // namespace ldprq

#endif  // LDPRQ_OLH_H_
