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

#include "ldprq/defense.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace ldprq {

std::vector<double> OnesCountCdf(int n, double q) {
  if (n < 1) throw std::invalid_argument("OUE length must be positive");
  const int m = n - 1;
  std::vector<double> binom(m + 1, 0.0);
  if (q <= 0.0) {
    binom[0] = 1.0;
  } else if (q >= 1.0) {
    binom[m] = 1.0;
  } else {
    for (int k = 0; k <= m; ++k) {
      const double log_pmf = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                             k * std::log(q) + (m - k) * std::log1p(-q);
      binom[k] = std::exp(log_pmf);
    }
  }
  std::vector<double> cdf(n + 1, 0.0);
  double running = 0.0;
  for (int x = 0; x <= n; ++x) {
    const double pmf = 0.5 * (x <= m ? binom[x] : 0.0) + 0.5 * (x >= 1 ? binom[x - 1] : 0.0);
    running += pmf;
    cdf[x] = std::min(running, 1.0);
  }
  cdf[n] = 1.0;
  return cdf;
}

double InverseNormalCdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0, 1)");
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double OutsideMass(double z) { return (1.0 - std::sqrt(1.0 / (1.0 + z * z))) / 2.0; }

TreeDetection TreeDetect(std::span<const int> ones_counts, int n, double q,
                         const TreeDefenseParams& params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  const std::vector<double> cdf = OnesCountCdf(n, q);
  const double z = InverseNormalCdf(1.0 - params.alpha);
  const double closed_form = OutsideMass(z);
  const double f_out = params.tail == TailMass::kInside ? 1.0 - closed_form : closed_form;

  TreeDetection result;
  result.lower = 0;
  for (int x = 0; x <= n; ++x) {
    if (cdf[x] <= f_out / 2.0) result.lower = x;
  }
  result.upper = n;
  for (int x = n; x >= 0; --x) {
    if (cdf[x] >= 1.0 - f_out / 2.0) result.upper = x;
  }

  double f = f_out;
  if (params.tail == TailMass::kExact) {
    const double below = result.lower > 0 ? cdf[result.lower - 1] : 0.0;
    const double above = 1.0 - cdf[result.upper];
    f = std::clamp(below + above, 0.0, 1.0);
  }
  result.outside_mass = f;

  std::int64_t outliers = 0;
  for (int c : ones_counts) {
    if (c < result.lower || c > result.upper) ++outliers;
  }
  const double users = static_cast<double>(ones_counts.size());
  result.statistic = static_cast<double>(outliers);
  result.threshold = users * f + z * std::sqrt(users * f * (1.0 - f));
  result.detected = result.statistic > result.threshold;
  return result;
}

TreeDetection TreeDetect(std::span<const OueReport> reports, const OueParams& oue,
                         const TreeDefenseParams& params) {
  std::vector<int> counts;
  counts.reserve(reports.size());
  for (const OueReport& r : reports) {
    if (r.size() != oue.n) throw std::invalid_argument("report length differs from n");
    counts.push_back(r.CountOnes());
  }
  return TreeDetect(counts, oue.n, oue.q, params);
}

std::vector<double> MaxLoadCdf(std::int64_t balls, std::int64_t bins, int trials, Rng& rng) {
  if (trials < 100) throw std::invalid_argument("max-load simulation needs at least 100 trials");
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  if (balls < 0) throw std::invalid_argument("negative ball count");
  std::vector<std::int64_t> maxima(trials, 0);
  std::vector<std::int32_t> load(static_cast<std::size_t>(bins));
  std::uniform_int_distribution<std::int64_t> pick(0, bins - 1);
  for (int t = 0; t < trials; ++t) {
    std::fill(load.begin(), load.end(), 0);
    std::int32_t best = 0;
    for (std::int64_t b = 0; b < balls; ++b) best = std::max(best, ++load[pick(rng)]);
    maxima[t] = best;
  }
  const std::int64_t top = *std::max_element(maxima.begin(), maxima.end());
  std::vector<double> cdf(top + 1, 0.0);
  for (std::int64_t m : maxima) cdf[m] += 1.0;
  double running = 0.0;
  for (double& c : cdf) {
    running += c;
    c = running / trials;
  }
  cdf.back() = 1.0;
  return cdf;
}

const std::vector<double>& CachedMaxLoadCdf(std::int64_t balls, std::int64_t bins) {
  constexpr int kTrials = 1000;
  constexpr std::uint64_t kSeed = 0x6d61786c6f6164ULL;
  static std::mutex mu;
  static std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<std::vector<double>>>
      cache;
  const auto key = std::make_pair(balls, bins);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  Rng rng = MakeRng(kSeed, {static_cast<std::uint64_t>(balls), static_cast<std::uint64_t>(bins)});
  auto cdf = std::make_unique<std::vector<double>>(MaxLoadCdf(balls, bins, kTrials, rng));
  std::lock_guard<std::mutex> lock(mu);
  // Another thread may have won the race; both computed the same table.
  auto [it, inserted] = cache.emplace(key, std::move(cdf));
  return *it->second;
}

double CdfAt(std::span<const double> cdf, std::int64_t x) {
  if (x < 0) return 0.0;
  if (x >= static_cast<std::int64_t>(cdf.size())) return 1.0;
  return cdf[x];
}

std::int64_t MaxLoadThreshold(std::int64_t balls, std::int64_t bins, double alpha) {
  const std::vector<double>& cdf = CachedMaxLoadCdf(balls, bins);
  std::int64_t x = 0;
  while (CdfAt(cdf, x) <= 1.0 - alpha) ++x;
  return x;
}

GridDetection GridDetect(std::span<const HashPair> pairs, std::int64_t family_size, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (family_size < 1) throw std::invalid_argument("family size must be positive");
  std::vector<std::int64_t> load(static_cast<std::size_t>(family_size), 0);
  std::int64_t observed = 0;
  for (const HashPair& p : pairs) {
    if (p.fn_id < 0 || p.fn_id >= family_size) throw std::out_of_range("hash id outside family");
    observed = std::max(observed, ++load[p.fn_id]);
  }
  const std::int64_t n = static_cast<std::int64_t>(pairs.size());
  GridDetection result;
  result.statistic = static_cast<double>(observed);
  result.threshold = static_cast<double>(MaxLoadThreshold(n, family_size, alpha) - 1);
  result.detected = CdfAt(CachedMaxLoadCdf(n, family_size), observed) > 1.0 - alpha;
  const double log_n = std::log(static_cast<double>(std::max<std::int64_t>(n, 1)));
  result.analytic_guide = log_n / (log_n - std::log(static_cast<double>(family_size)));
  return result;
}

}  // namespace ldprq
