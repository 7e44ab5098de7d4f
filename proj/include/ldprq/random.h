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

#ifndef LDPRQ_RANDOM_H_
#define LDPRQ_RANDOM_H_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <vector>

namespace ldprq {

// Every stochastic routine takes one of these explicitly; a run is
// reproducible from its seed on a given standard library.
using Rng = std::mt19937_64;

// Derives an independent stream from a parent seed and a list of stream
// labels (trial index, query index, ...).
inline Rng MakeRng(std::uint64_t seed, std::initializer_list<std::uint64_t> labels = {}) {
  std::vector<std::uint32_t> words;
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (std::uint64_t label : labels) {
    words.push_back(static_cast<std::uint32_t>(label));
    words.push_back(static_cast<std::uint32_t>(label >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool Bernoulli(Rng& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

inline std::int64_t Binomial(Rng& rng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<std::int64_t>(trials, p)(rng);
}

// Draws `k` distinct indices from [0, n) (partial Fisher-Yates over an index
// table; order of the result is random).
inline std::vector<std::size_t> SampleWithoutReplacement(Rng& rng, std::size_t n,
                                                         std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + UniformIndex(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace ldprq

#endif  // LDPRQ_RANDOM_H_
