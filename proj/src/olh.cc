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

#include "ldprq/olh.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ldprq {

bool IsPrime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::int64_t NextPrimeAbove(std::int64_t n) {
  std::int64_t candidate = n + 1;
  while (!IsPrime(candidate)) ++candidate;
  return candidate;
}

HashFamily::HashFamily(std::int64_t prime, int g, std::int64_t size, int num_cells)
    : prime_(prime), g_(g), size_(size), num_cells_(num_cells) {
  if (!IsPrime(prime)) throw std::invalid_argument(std::to_string(prime) + " is not prime");
  if (num_cells < 1 || prime <= num_cells) {
    throw std::invalid_argument("hash prime must exceed the number of cells");
  }
  if (g < 2) throw std::invalid_argument("OLH needs at least two hash keys");
  if (size < 1 || size > prime * prime) {
    throw std::invalid_argument("hash family size outside [1, P^2]");
  }
}

HashFamily HashFamily::ForCells(int num_cells, int g, std::int64_t requested_size) {
  requested_size = std::max<std::int64_t>(requested_size, 1);
  std::int64_t prime = NextPrimeAbove(num_cells);
  while (prime * prime < requested_size) prime = NextPrimeAbove(prime);
  return HashFamily(prime, g, prime * prime, num_cells);
}

LinearHash HashFamily::Function(std::int64_t fn_id) const {
  if (fn_id < 0 || fn_id >= size_) {
    throw std::out_of_range("hash function id " + std::to_string(fn_id) + " out of range");
  }
  return LinearHash{fn_id / prime_, fn_id % prime_};
}

int HashFamily::Eval(std::int64_t fn_id, int cell) const {
  if (cell < 0 || cell >= prime_) throw std::out_of_range("cell outside the hash domain");
  return Function(fn_id).Eval(cell, prime_, g_);
}

OlhParams OlhParams::Make(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("OLH epsilon must be a positive finite number");
  }
  OlhParams params;
  params.epsilon = epsilon;
  params.g = std::max(2, static_cast<int>(std::lround(std::exp(epsilon) + 1.0)));
  params.q = 1.0 / params.g;
  return params;
}

HashPair OlhPerturb(int true_cell, const HashFamily& family, const OlhParams& params, Rng& rng) {
  if (true_cell < 0 || true_cell >= family.num_cells()) {
    throw std::invalid_argument("OLH cell " + std::to_string(true_cell) + " outside the grid");
  }
  HashPair pair;
  pair.fn_id = static_cast<std::int64_t>(UniformIndex(rng, family.size()));
  const int hashed = family.Eval(pair.fn_id, true_cell);
  if (Bernoulli(rng, 0.5)) {
    pair.key = hashed;
  } else {
    // Uniform over the g - 1 other keys.
    int other = static_cast<int>(UniformIndex(rng, params.g - 1));
    pair.key = other >= hashed ? other + 1 : other;
  }
  return pair;
}

std::vector<int> SupportOf(const LinearHash& fn, int key, std::int64_t prime, int g,
                           std::span<const int> cells) {
  std::vector<int> support;
  for (int cell : cells) {
    if (fn.Eval(cell, prime, g) == key) support.push_back(cell);
  }
  return support;
}

std::vector<int> OlhSupport(const HashPair& pair, const HashFamily& family,
                            std::span<const int> cells) {
  return SupportOf(family.Function(pair.fn_id), pair.key, family.prime(), family.g(), cells);
}

void AccumulateOlh(const HashPair& pair, const HashFamily& family, std::span<std::int64_t> counts) {
  const LinearHash fn = family.Function(pair.fn_id);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (fn.Eval(static_cast<std::int64_t>(c), family.prime(), family.g()) == pair.key) ++counts[c];
  }
}

FrequencyVector OlhEstimateFromCounts(std::span<const std::int64_t> counts,
                                      std::int64_t num_reports, const OlhParams& params) {
  if (num_reports <= 0) throw std::invalid_argument("OLH aggregation needs at least one report");
  const double n = static_cast<double>(num_reports);
  const double scale = n * (0.5 - params.q);
  FrequencyVector freqs(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    freqs[v] = (static_cast<double>(counts[v]) - n * params.q) / scale;
  }
  return freqs;
}

FrequencyVector OlhAggregate(std::span<const HashPair> pairs, const HashFamily& family,
                             const OlhParams& params) {
  if (pairs.empty()) throw std::invalid_argument("OLH aggregation needs at least one report");
  std::vector<std::int64_t> counts(family.num_cells(), 0);
  for (const HashPair& pair : pairs) AccumulateOlh(pair, family, counts);
  return OlhEstimateFromCounts(counts, static_cast<std::int64_t>(pairs.size()), params);
}

double OlhStddev(const OlhParams& params, std::int64_t num_reports) {
  const double gap = 0.5 - params.q;
  return std::sqrt(params.q * (1.0 - params.q) / (static_cast<double>(num_reports) * gap * gap));
}

}  // namespace ldprq
