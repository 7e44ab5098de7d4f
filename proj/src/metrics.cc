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

#include "ldprq/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ldprq {

double TrueFrequency(std::span<const Record> records, const RangeQuery& q) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::size_t inside = 0;
  for (const Record& r : records) {
    bool in = true;
    for (std::size_t k = 0; k < q.attrs.size() && in; ++k) {
      in = q.intervals[k].Contains(r.at(q.attrs[k]));
    }
    if (in) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(records.size());
}

double TrueFrequency(std::span<const int> values, Interval q) {
  if (values.empty()) throw std::invalid_argument("no records");
  const auto inside = std::count_if(values.begin(), values.end(), [&](int v) { return q.Contains(v); });
  return static_cast<double>(inside) / static_cast<double>(values.size());
}

std::vector<RangeQuery> GenQueries(int count, int domain, int dims_total, int dims_query, Rng& rng) {
  if (dims_query < 1 || dims_query > dims_total) {
    throw ConfigError("query dimensions must lie in [1, total dimensions]");
  }
  if (domain < 8) throw ConfigError("domain too small for query lengths in [c/8, 3c/8]");
  std::uniform_int_distribution<int> center(0, domain - 1);
  std::uniform_int_distribution<int> length(domain / 8, 3 * domain / 8);
  std::vector<RangeQuery> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    std::vector<std::size_t> pick = SampleWithoutReplacement(rng, dims_total, dims_query);
    std::sort(pick.begin(), pick.end());
    RangeQuery q;
    for (std::size_t a : pick) {
      const int c = center(rng);
      const int len = length(rng);
      const int lo = std::max(0, c - len / 2);
      const int hi = std::min(domain, c - len / 2 + len);
      q.attrs.push_back(static_cast<int>(a));
      q.intervals.push_back(Interval{lo, std::max(hi, lo + 1)});
    }
    out.push_back(std::move(q));
  }
  return out;
}

double Efficiency(double f_true, double f_poisoned, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("efficiency needs rho > 0");
  return (f_poisoned - f_true) / rho;
}

double MgaEfficiencyBound(double epsilon) {
  const double e = std::exp(epsilon);
  return 2.0 * e / (e - 1.0);
}

double PrismViolationRatio(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double e = std::exp(epsilon);
  const double p = e / (e + 1.0);
  const double q = 1.0 / (e + 1.0);
  return (p / q) * (p / q);
}

std::vector<int> RrrEncode(int value, int d) {
  if (value < 0 || value >= d) throw std::invalid_argument("value outside the domain");
  std::vector<int> bits(d);
  for (int i = 0; i < d; ++i) bits[i] = i <= value ? 1 : 0;
  return bits;
}

double RrrOutcomeProbability(int value, std::span<const int> outcome, double epsilon) {
  const std::vector<int> bits = RrrEncode(value, static_cast<int>(outcome.size()));
  const double e = std::exp(epsilon);
  const double keep = e / (e + 1.0);
  double prob = 1.0;
  for (std::size_t i = 0; i < bits.size(); ++i) prob *= bits[i] == outcome[i] ? keep : 1.0 - keep;
  return prob;
}

}  // namespace ldprq
