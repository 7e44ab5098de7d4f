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

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "ldprq/olh.h"
#include "ldprq/oue.h"
#include "ldprq/random.h"

namespace ldprq {
namespace {

const double kLn3 = std::log(3.0);

TEST(OueParamsTest, LnThreeGivesQuarter) {
  const OueParams p = OueParams::Make(kLn3, 8);
  EXPECT_DOUBLE_EQ(p.p, 0.5);
  EXPECT_NEAR(p.q, 0.25, 1e-15);
}

TEST(OueParamsTest, QDecreasesWithEpsilon) {
  double prev = 0.5;
  for (double eps : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double q = OueParams::Make(eps, 4).q;
    EXPECT_GT(q, 0.0);
    EXPECT_LT(q, prev);
    prev = q;
  }
}

TEST(OueParamsTest, RejectsBadInput) {
  EXPECT_THROW(OueParams::Make(0.0, 4), std::invalid_argument);
  EXPECT_THROW(OueParams::Make(1.0, 0), std::invalid_argument);
}

TEST(OuePerturbTest, LargeEpsilonIsHalfOneHot) {
  const OueParams params = OueParams::Make(40.0, 16);
  Rng rng = MakeRng(11);
  const int trials = 100000;
  int true_ones = 0;
  int other_ones = 0;
  for (int i = 0; i < trials; ++i) {
    const OueReport r = OuePerturb(3, params, rng);
    true_ones += r.bits[3];
    other_ones += r.CountOnes() - r.bits[3];
  }
  const double sigma = std::sqrt(0.25 / trials);
  EXPECT_NEAR(static_cast<double>(true_ones) / trials, 0.5, 3 * sigma);
  EXPECT_EQ(other_ones, 0);
}

TEST(OuePerturbTest, MeanOnesCountMatchesAnalytic) {
  const OueParams params = OueParams::Make(1.0, 64);
  Rng rng = MakeRng(12);
  const int trials = 100000;
  double sum = 0.0;
  for (int i = 0; i < trials; ++i) sum += OuePerturb(0, params, rng).CountOnes();
  const double mean = 0.5 + 63 * params.q;
  const double var = 0.25 + 63 * params.q * (1 - params.q);
  EXPECT_NEAR(sum / trials, mean, 3 * std::sqrt(var / trials));
}

TEST(OuePerturbTest, RejectsIndexOutOfRange) {
  const OueParams params = OueParams::Make(1.0, 4);
  Rng rng = MakeRng(1);
  EXPECT_THROW(OuePerturb(4, params, rng), std::invalid_argument);
  EXPECT_THROW(OuePerturb(-1, params, rng), std::invalid_argument);
}

TEST(OueAggregateTest, FullPresenceAndAbsence) {
  const OueParams params = OueParams::Make(kLn3, 2);
  const std::vector<std::int64_t> counts = {50, 25};
  const FrequencyVector f = OueEstimateFromCounts(counts, 100, params);
  EXPECT_NEAR(f[0], 1.0, 1e-12);
  EXPECT_NEAR(f[1], 0.0, 1e-12);
}

TEST(OueAggregateTest, MatchesClosedFormOnRandomCounts) {
  Rng rng = MakeRng(13);
  const OueParams params = OueParams::Make(1.3, 40);
  const std::int64_t n = 5000;
  std::vector<std::int64_t> counts(40);
  for (auto& c : counts) c = static_cast<std::int64_t>(UniformIndex(rng, n + 1));
  const FrequencyVector f = OueEstimateFromCounts(counts, n, params);
  const double q = 1.0 / (std::exp(1.3) + 1.0);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    const double expected = (counts[v] - n * q) / (n * (0.5 - q));
    EXPECT_NEAR(f[v], expected, 1e-12);
  }
}

TEST(OueAggregateTest, SumIsAdditive) {
  Rng rng = MakeRng(14);
  const OueParams params = OueParams::Make(1.0, 20);
  std::vector<OueReport> reports;
  std::int64_t total_ones = 0;
  for (int i = 0; i < 300; ++i) {
    reports.push_back(OuePerturb(static_cast<int>(UniformIndex(rng, 20)), params, rng));
    total_ones += reports.back().CountOnes();
  }
  const FrequencyVector f = OueAggregate(reports, params);
  const double sum = std::accumulate(f.begin(), f.end(), 0.0);
  const double n = 300.0;
  EXPECT_NEAR(sum, (total_ones - n * 20 * params.q) / (n * (params.p - params.q)), 1e-9);
}

TEST(OueAggregateTest, ScaleInvariant) {
  const OueParams params = OueParams::Make(1.0, 3);
  const std::vector<std::int64_t> counts = {40, 17, 90};
  const std::vector<std::int64_t> doubled = {80, 34, 180};
  const FrequencyVector a = OueEstimateFromCounts(counts, 200, params);
  const FrequencyVector b = OueEstimateFromCounts(doubled, 400, params);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(OueAggregateTest, RejectsEmptyAndMismatch) {
  const OueParams params = OueParams::Make(1.0, 3);
  EXPECT_THROW(OueAggregate({}, params), std::invalid_argument);
  std::vector<OueReport> bad(1);
  bad[0].bits = {1, 0};
  EXPECT_THROW(OueAggregate(bad, params), std::invalid_argument);
}

TEST(HashFamilyTest, DegenerateFunctionMapsToZero) {
  const HashFamily family(17, 4, 289, 16);
  EXPECT_EQ(family.Function(0).a, 0);
  EXPECT_EQ(family.Function(0).b, 0);
  for (int cell = 0; cell < 17; ++cell) EXPECT_EQ(family.Eval(0, cell), 0);
}

TEST(HashFamilyTest, DirectArithmetic) {
  const HashFamily family(17, 4, 289, 16);
  const std::int64_t id = 1 * 17 + 0;  // a = 1, b = 0
  EXPECT_EQ(family.Function(id).a, 1);
  EXPECT_EQ(family.Function(id).b, 0);
  EXPECT_EQ(family.Eval(id, 5), 1);
  EXPECT_EQ(family.Eval(id, 5), family.Eval(id, 5));
}

TEST(HashFamilyTest, EnumerationOrder) {
  const HashFamily family(17, 4, 289, 16);
  for (std::int64_t id = 0; id < family.size(); ++id) {
    const LinearHash fn = family.Function(id);
    EXPECT_EQ(fn.a * 17 + fn.b, id);
  }
}

TEST(HashFamilyTest, RejectsBadArguments) {
  EXPECT_THROW(HashFamily(16, 4, 10, 8), std::invalid_argument);  // not prime
  EXPECT_THROW(HashFamily(17, 4, 10, 17), std::invalid_argument);  // P <= cells
  EXPECT_THROW(HashFamily(17, 1, 10, 8), std::invalid_argument);   // g < 2
  EXPECT_THROW(HashFamily(17, 4, 290, 8), std::invalid_argument);  // > P^2
  const HashFamily family(17, 4, 100, 16);
  EXPECT_THROW(family.Eval(100, 0), std::out_of_range);
  EXPECT_THROW(family.Eval(0, 17), std::out_of_range);
}

TEST(HashFamilyTest, ForCellsReturnsFullFamily) {
  const HashFamily f = HashFamily::ForCells(16, 4, 289);
  EXPECT_EQ(f.prime(), 17);
  EXPECT_EQ(f.size(), 289);
  const HashFamily g = HashFamily::ForCells(16, 4, 290);
  EXPECT_EQ(g.prime(), 19);
  EXPECT_EQ(g.size(), 361);
}

// Exhaustive over the family: collision rate of every cell pair equals
// sum_k n_k^2 / P^2, within 1/P^2 of 1/g.
TEST(HashFamilyTest, CollisionProbabilityNearOneOverG) {
  for (int prime : {17, 37}) {
    const int g = 4;
    const HashFamily family(prime, g, static_cast<std::int64_t>(prime) * prime, 16);
    double expected = 0.0;
    for (int k = 0; k < g; ++k) {
      const double n_k = (prime - k + g - 1) / g;
      expected += n_k * n_k;
    }
    expected /= static_cast<double>(prime) * prime;
    EXPECT_LE(std::abs(expected - 1.0 / g), 1.0 / prime);
    for (int x = 0; x < 16; ++x) {
      for (int y = x + 1; y < 16; ++y) {
        int collisions = 0;
        for (std::int64_t id = 0; id < family.size(); ++id) {
          collisions += family.Eval(id, x) == family.Eval(id, y);
        }
        EXPECT_NEAR(static_cast<double>(collisions) / family.size(), expected, 1e-12);
      }
    }
  }
}

TEST(OlhParamsTest, KeyCount) {
  EXPECT_EQ(OlhParams::Make(kLn3).g, 4);
  EXPECT_EQ(OlhParams::Make(1.0).g, 4);
  EXPECT_DOUBLE_EQ(OlhParams::Make(1.0).q, 0.25);
  EXPECT_EQ(OlhParams::Make(0.01).g, 2);
}

TEST(OlhPerturbTest, TwoKeysIsFairCoin) {
  OlhParams params = OlhParams::Make(kLn3);
  params.g = 2;
  params.q = 0.5;
  const HashFamily family(17, 2, 289, 16);
  Rng rng = MakeRng(21);
  const int trials = 100000;
  int kept = 0;
  for (int i = 0; i < trials; ++i) {
    const HashPair p = OlhPerturb(7, family, params, rng);
    kept += p.key == family.Eval(p.fn_id, 7);
  }
  EXPECT_NEAR(static_cast<double>(kept) / trials, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(OlhPerturbTest, FunctionIdIsUniform) {
  const OlhParams params = OlhParams::Make(1.0);
  const HashFamily family(17, params.g, 100, 16);
  Rng rng = MakeRng(22);
  const int trials = 100000;
  std::vector<int> hist(100, 0);
  for (int i = 0; i < trials; ++i) ++hist[OlhPerturb(3, family, params, rng).fn_id];
  double chi2 = 0.0;
  const double expected = trials / 100.0;
  for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
  // Upper 1% point of chi-square with 99 degrees of freedom.
  EXPECT_LT(chi2, 134.64);
}

TEST(OlhPerturbTest, KeyFrequenciesMatchAnalytic) {
  const OlhParams params = OlhParams::Make(kLn3);
  ASSERT_EQ(params.g, 4);
  const HashFamily family(17, params.g, 289, 16);
  Rng rng = MakeRng(23);
  const int trials = 100000;
  std::vector<int> by_offset(4, 0);
  for (int i = 0; i < trials; ++i) {
    const HashPair p = OlhPerturb(9, family, params, rng);
    ++by_offset[(p.key - family.Eval(p.fn_id, 9) + 4) % 4];
  }
  const double sd_true = std::sqrt(0.25 / trials);
  EXPECT_NEAR(by_offset[0] / static_cast<double>(trials), 0.5, 3 * sd_true);
  const double wrong = 0.5 / 3;
  const double sd_wrong = std::sqrt(wrong * (1 - wrong) / trials);
  for (int k = 1; k < 4; ++k) {
    EXPECT_NEAR(by_offset[k] / static_cast<double>(trials), wrong, 3 * sd_wrong);
  }
}

TEST(OlhSupportTest, DegenerateFunction) {
  const HashFamily family(17, 4, 289, 16);
  std::vector<int> cells(16);
  std::iota(cells.begin(), cells.end(), 0);
  EXPECT_EQ(OlhSupport({0, 0}, family, cells), cells);
  EXPECT_TRUE(OlhSupport({0, 1}, family, cells).empty());
  EXPECT_EQ(SupportOf(LinearHash{0, 0}, 0, 17, 4, cells), cells);
}

TEST(OlhSupportTest, MatchesScanAndPartitionsCells) {
  const HashFamily family(17, 4, 289, 16);
  std::vector<int> cells(16);
  std::iota(cells.begin(), cells.end(), 0);
  Rng rng = MakeRng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t fn = static_cast<std::int64_t>(UniformIndex(rng, family.size()));
    std::vector<int> owner(16, -1);
    for (int key = 0; key < 4; ++key) {
      const std::vector<int> support = OlhSupport({fn, key}, family, cells);
      std::vector<int> scan;
      for (int c : cells) {
        if (family.Eval(fn, c) == key) scan.push_back(c);
      }
      EXPECT_EQ(support, scan);
      for (int c : support) {
        EXPECT_EQ(owner[c], -1);
        owner[c] = key;
      }
    }
    for (int o : owner) EXPECT_NE(o, -1);
  }
}

TEST(OlhAggregateTest, ClosedFormValues) {
  const OlhParams params = OlhParams::Make(1.0);
  ASSERT_EQ(params.g, 4);
  const std::vector<std::int64_t> all = {1000};
  EXPECT_NEAR(OlhEstimateFromCounts(all, 1000, params)[0], 3.0, 1e-12);
  const std::vector<std::int64_t> quarter = {250};
  EXPECT_NEAR(OlhEstimateFromCounts(quarter, 1000, params)[0], 0.0, 1e-12);
  const std::vector<std::int64_t> doubled = {500};
  EXPECT_NEAR(OlhEstimateFromCounts(doubled, 2000, params)[0], 0.0, 1e-12);
}

TEST(OlhAggregateTest, RejectsEmpty) {
  const HashFamily family(17, 4, 100, 16);
  EXPECT_THROW(OlhAggregate({}, family, OlhParams::Make(1.0)), std::invalid_argument);
}

TEST(OlhAggregateTest, UnbiasedOnKnownDistribution) {
  const OlhParams params = OlhParams::Make(1.0);
  const HashFamily family = HashFamily::ForCells(16, params.g, 2000);
  const int n = 20000;
  const int reps = 20;
  std::vector<int> cells(n);
  std::vector<double> truth(16, 0.0);
  for (int i = 0; i < n; ++i) {
    cells[i] = i < 0.6 * n ? (i % 4) : 4 + (i % 12);
    truth[cells[i]] += 1.0 / n;
  }
  std::vector<double> mean(16, 0.0);
  for (int r = 0; r < reps; ++r) {
    Rng rng = MakeRng(25, {static_cast<std::uint64_t>(r)});
    std::vector<HashPair> pairs;
    for (int cell : cells) pairs.push_back(OlhPerturb(cell, family, params, rng));
    const FrequencyVector f = OlhAggregate(pairs, family, params);
    for (int v = 0; v < 16; ++v) mean[v] += f[v] / reps;
  }
  const double sigma = OlhStddev(params, n) / std::sqrt(reps);
  for (int v = 0; v < 16; ++v) EXPECT_NEAR(mean[v], truth[v], 3.5 * sigma) << "cell " << v;
}

}  // namespace
}  // namespace ldprq
