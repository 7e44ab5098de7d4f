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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ldprq/defense.h"
#include "ldprq/olh.h"
#include "ldprq/oue.h"
#include "ldprq/random.h"

namespace ldprq {
namespace {

TEST(OnesCountCdfTest, SingleBit) {
  const std::vector<double> cdf = OnesCountCdf(1, 0.3);
  ASSERT_EQ(cdf.size(), 2u);
  EXPECT_DOUBLE_EQ(cdf[0], 0.5);
  EXPECT_DOUBLE_EQ(cdf[1], 1.0);
  EXPECT_THROW(OnesCountCdf(0, 0.3), std::invalid_argument);
}

TEST(OnesCountCdfTest, MonotoneEndingAtOne) {
  for (int n : {2, 7, 64, 1024}) {
    const std::vector<double> cdf = OnesCountCdf(n, 0.2689);
    ASSERT_EQ(static_cast<int>(cdf.size()), n + 1);
    for (int x = 1; x <= n; ++x) EXPECT_GE(cdf[x], cdf[x - 1]);
    EXPECT_EQ(cdf[n], 1.0);
  }
}

TEST(OnesCountCdfTest, MatchesSampledCounts) {
  const int n = 32;
  const double q = 1.0 / (std::exp(1.0) + 1.0);
  const std::vector<double> cdf = OnesCountCdf(n, q);
  Rng rng = MakeRng(91);
  std::vector<double> hist(n + 1, 0.0);
  const int samples = 1000000;
  for (int k = 0; k < samples; ++k) {
    ++hist[Binomial(rng, n - 1, q) + (Bernoulli(rng, 0.5) ? 1 : 0)];
  }
  double running = 0.0;
  double ks = 0.0;
  for (int x = 0; x <= n; ++x) {
    running += hist[x] / samples;
    ks = std::max(ks, std::abs(running - cdf[x]));
  }
  EXPECT_LT(ks, 0.005);
}

TEST(TreeDefenseTest, ZScoreAndOutsideMass) {
  const double z = InverseNormalCdf(1.0 - 0.005);
  EXPECT_NEAR(z, 2.5758293035489, 1e-6);
  EXPECT_NEAR(OutsideMass(z), 0.3190, 5e-5);
  EXPECT_THROW(InverseNormalCdf(1.0), std::invalid_argument);
}

TEST(TreeDefenseTest, OutsideMassMaximizesTheThresholdShape) {
  // (1 - f) + z sqrt(f (1 - f)) peaks at the closed form.
  const double z = InverseNormalCdf(1.0 - 0.005);
  double best_f = 0.0;
  double best = -1.0;
  for (int i = 1; i < 1000000; ++i) {
    const double f = i / 1e6;
    const double v = (1.0 - f) + z * std::sqrt(f * (1.0 - f));
    if (v > best) {
      best = v;
      best_f = f;
    }
  }
  EXPECT_NEAR(best_f, OutsideMass(z), 1e-4);
}

TEST(TreeDefenseTest, IntervalAndThreshold) {
  const int n = 16;
  const double q = 0.25;
  const std::vector<double> cdf = OnesCountCdf(n, q);
  const double z = InverseNormalCdf(0.995);
  const double f = OutsideMass(z);
  std::vector<int> counts(5000, 4);
  const TreeDetection d = TreeDetect(counts, n, q, TreeDefenseParams{});
  EXPECT_LE(cdf[d.lower], f / 2);
  if (d.lower + 1 <= n) EXPECT_GT(cdf[d.lower + 1], f / 2);
  EXPECT_GE(cdf[d.upper], 1 - f / 2);
  if (d.upper > 0) EXPECT_LT(cdf[d.upper - 1], 1 - f / 2);
  EXPECT_NEAR(d.threshold, 5000 * f + z * std::sqrt(5000 * f * (1 - f)), 1e-9);
  EXPECT_DOUBLE_EQ(d.outside_mass, f);
}

std::vector<int> HonestCounts(Rng& rng, int users, const OueParams& params) {
  std::vector<int> counts(users);
  for (int& c : counts) {
    c = OuePerturb(static_cast<int>(UniformIndex(rng, params.n)), params, rng).CountOnes();
  }
  return counts;
}

TEST(TreeDefenseTest, HonestRoundsRarelyFlagged) {
  const OueParams params = OueParams::Make(1.0, 64);
  Rng rng = MakeRng(92);
  int flagged = 0;
  int flagged_exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> counts = HonestCounts(rng, 5000, params);
    flagged += TreeDetect(counts, params.n, params.q, TreeDefenseParams{}).detected;
    flagged_exact +=
        TreeDetect(counts, params.n, params.q, TreeDefenseParams{0.005, TailMass::kExact}).detected;
  }
  EXPECT_LE(flagged, 5);
  EXPECT_LE(flagged_exact, 5);
}

TEST(TreeDefenseTest, ExactTailNeverExceedsNominal) {
  for (int n : {4, 16, 64, 512}) {
    const std::vector<int> none;
    const double q = OueParams::Make(1.0, n).q;
    const TreeDetection nominal = TreeDetect(none, n, q, TreeDefenseParams{});
    const TreeDetection exact = TreeDetect(none, n, q, TreeDefenseParams{0.005, TailMass::kExact});
    EXPECT_LE(exact.outside_mass, nominal.outside_mass);
    EXPECT_EQ(exact.lower, nominal.lower);
    EXPECT_EQ(exact.upper, nominal.upper);
  }
}

TEST(TreeDefenseTest, InsideReadingNarrowsTheInterval) {
  const int n = 512;
  const double q = OueParams::Make(1.0, n).q;
  const std::vector<double> cdf = OnesCountCdf(n, q);
  const TreeDetection nominal = TreeDetect(std::vector<int>{}, n, q, TreeDefenseParams{});
  const TreeDetection inside =
      TreeDetect(std::vector<int>{}, n, q, TreeDefenseParams{0.005, TailMass::kInside});
  EXPECT_NEAR(inside.outside_mass, 1.0 - nominal.outside_mass, 1e-15);
  EXPECT_GE(inside.lower, nominal.lower);
  EXPECT_LE(inside.upper, nominal.upper);
  EXPECT_LE(cdf[inside.lower], inside.outside_mass / 2);
  EXPECT_GE(cdf[inside.upper], 1.0 - inside.outside_mass / 2);

  Rng rng = MakeRng(94);
  const OueParams params = OueParams::Make(1.0, 64);
  int flagged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> counts = HonestCounts(rng, 5000, params);
    flagged += TreeDetect(counts, params.n, params.q, {0.005, TailMass::kInside}).detected;
  }
  EXPECT_LE(flagged, 5);
}

TEST(TreeDefenseTest, ConstantReportsAreFlagged) {
  // Every fake user reporting a single 1 sits far below the honest mean.
  const OueParams params = OueParams::Make(1.0, 64);
  const TreeDefenseParams exact{0.005, TailMass::kExact};
  Rng rng = MakeRng(93);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> counts = HonestCounts(rng, 4750, params);
    counts.insert(counts.end(), 250, 1);
    EXPECT_TRUE(TreeDetect(counts, params.n, params.q, exact).detected);
    counts.insert(counts.end(), 1000, 1);
    EXPECT_TRUE(TreeDetect(counts, params.n, params.q, TreeDefenseParams{}).detected);
  }
}

TEST(TreeDefenseTest, ReportOverloadChecksLength) {
  const OueParams params = OueParams::Make(1.0, 8);
  std::vector<OueReport> reports(3);
  for (auto& r : reports) r.bits.assign(8, 0);
  EXPECT_NO_THROW(TreeDetect(reports, params, TreeDefenseParams{}));
  reports[1].bits.resize(7);
  EXPECT_THROW(TreeDetect(reports, params, TreeDefenseParams{}), std::invalid_argument);
}

TEST(MaxLoadTest, SingleBin) {
  Rng rng = MakeRng(94);
  const std::vector<double> cdf = MaxLoadCdf(37, 1, 100, rng);
  ASSERT_EQ(cdf.size(), 38u);
  EXPECT_EQ(cdf[36], 0.0);
  EXPECT_EQ(cdf[37], 1.0);
}

TEST(MaxLoadTest, ThousandBallsThousandBins) {
  Rng rng = MakeRng(95);
  const std::vector<double> cdf = MaxLoadCdf(1000, 1000, 1000, rng);
  for (std::size_t x = 1; x < cdf.size(); ++x) EXPECT_GE(cdf[x], cdf[x - 1]);
  EXPECT_EQ(cdf.back(), 1.0);
  std::int64_t q05 = 0;
  while (CdfAt(cdf, q05) < 0.05) ++q05;
  std::int64_t q95 = 0;
  while (CdfAt(cdf, q95) < 0.95) ++q95;
  EXPECT_GE(q05, 4);
  EXPECT_LE(q95, 9);
}

TEST(MaxLoadTest, ErrorsAndCache) {
  Rng rng = MakeRng(96);
  EXPECT_THROW(MaxLoadCdf(10, 10, 99, rng), std::invalid_argument);
  EXPECT_THROW(MaxLoadCdf(10, 0, 100, rng), std::invalid_argument);
  const std::vector<double>& a = CachedMaxLoadCdf(500, 300);
  const std::vector<double>& b = CachedMaxLoadCdf(500, 300);
  EXPECT_EQ(&a, &b);
}

TEST(GridDefenseTest, OneSharedFunctionIsFlagged) {
  const std::vector<HashPair> pairs(2000, HashPair{3, 1});
  const GridDetection d = GridDetect(pairs, 289, 0.005);
  EXPECT_EQ(d.statistic, 2000.0);
  EXPECT_TRUE(d.detected);
  EXPECT_THROW(GridDetect(std::vector<HashPair>{{289, 0}}, 289, 0.005), std::out_of_range);
}

TEST(GridDefenseTest, HonestFalsePositivesWithinTwiceAlpha) {
  const HashFamily family = HashFamily::ForCells(16, 4, 289);
  Rng rng = MakeRng(97);
  std::vector<HashPair> pairs(20000);
  int flagged = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    for (HashPair& p : pairs) {
      p.fn_id = static_cast<std::int64_t>(UniformIndex(rng, family.size()));
    }
    flagged += GridDetect(pairs, family.size(), 0.005).detected;
  }
  EXPECT_LE(flagged, 2 * 0.005 * trials);
}

}  // namespace
}  // namespace ldprq
