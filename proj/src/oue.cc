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

#include "ldprq/oue.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ldprq {

OueParams OueParams::Make(double epsilon, int n) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("OUE epsilon must be a positive finite number");
  }
  if (n < 1) throw std::invalid_argument("OUE vector length must be >= 1");
  OueParams params;
  params.epsilon = epsilon;
  params.n = n;
  params.p = 0.5;
  params.q = 1.0 / (std::exp(epsilon) + 1.0);
  return params;
}

int OueReport::CountOnes() const {
  return static_cast<int>(std::accumulate(bits.begin(), bits.end(), 0));
}

OueReport OuePerturb(int true_index, const OueParams& params, Rng& rng) {
  if (true_index < 0 || true_index >= params.n) {
    throw std::invalid_argument("OUE index " + std::to_string(true_index) +
                                " outside [0, " + std::to_string(params.n) + ")");
  }
  OueReport report;
  report.bits.assign(params.n, 0);
  // Noise bits are placed by geometric skipping: O(n q) draws per report.
  // Gaps are drawn in floating point so that tiny q cannot overflow.
  if (params.q > 0.0) {
    const double log_miss = std::log1p(-params.q);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto gap = [&] { return std::floor(std::log1p(-unit(rng)) / log_miss); };
    for (double pos = gap(); pos < params.n; pos += 1.0 + gap()) {
      report.bits[static_cast<std::size_t>(pos)] = 1;
    }
  }
  report.bits[true_index] = Bernoulli(rng, params.p) ? 1 : 0;
  return report;
}

void AccumulateOue(const OueReport& report, std::span<std::int64_t> counts) {
  if (report.bits.size() != counts.size()) {
    throw std::invalid_argument("OUE report length does not match the count vector");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += report.bits[i];
}

FrequencyVector OueEstimateFromCounts(std::span<const std::int64_t> counts,
                                      std::int64_t num_reports, const OueParams& params) {
  if (num_reports <= 0) throw std::invalid_argument("OUE aggregation needs at least one report");
  const double n = static_cast<double>(num_reports);
  const double scale = n * (params.p - params.q);
  FrequencyVector freqs(counts.size());
  for (std::size_t v = 0; v < counts.size(); ++v) {
    freqs[v] = (static_cast<double>(counts[v]) - n * params.q) / scale;
  }
  return freqs;
}

FrequencyVector OueAggregate(std::span<const OueReport> reports, const OueParams& params) {
  if (reports.empty()) throw std::invalid_argument("OUE aggregation needs at least one report");
  std::vector<std::int64_t> counts(params.n, 0);
  for (const OueReport& report : reports) AccumulateOue(report, counts);
  return OueEstimateFromCounts(counts, static_cast<std::int64_t>(reports.size()), params);
}

double OueStddev(const OueParams& params, std::int64_t num_reports) {
  const double gap = params.p - params.q;
  return std::sqrt(params.q * (1.0 - params.q) /
                   (static_cast<double>(num_reports) * gap * gap));
}

}  // namespace ldprq
