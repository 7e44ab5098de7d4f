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
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "ldprq/dataset.h"
#include "ldprq/defense.h"
#include "ldprq/grid.h"
#include "ldprq/grid_attacks.h"
#include "ldprq/hdg.h"
#include "ldprq/random.h"

namespace ldprq {
namespace {

GridSet MakeGrids(int d, std::int64_t family_size = 289) {
  GridSpec spec;
  spec.d = d;
  spec.g1 = 16;
  spec.g2 = 4;
  spec.domain = 64;
  return GridSet(spec, HashFamily::ForCells(16, 4, family_size));
}

// Support of (fn, key) on grid i by evaluating every cell.
CellMask ScanSupport(const GridSet& grids, int i, const HashPair& p) {
  CellMask m = 0;
  for (int c = 0; c < grids.grid(i).num_cells(); ++c) {
    if (grids.family().Eval(p.fn_id, c) == p.key) m |= CellMask{1} << c;
  }
  return m;
}

// Closed forms written out term by term.
double W1(double rho, double g, double g1, double g2, double d) {
  const double lead = (0.5 - 1.0 / g) / rho;
  const double num = (d - 1.0) * g1 + g2 * g2;
  const double den = (d - 1.0) * (g1 - 2.0 * g2) + g2 * g2;
  return lead * num / den;
}

double W2(double rho, double g, double g1, double g2, double d) {
  const double lead = (0.5 - 1.0 / g) / rho;
  const double inner = 3.0 * g1 / (g1 * (d - 1.0) + g2 * g2);
  return lead * g2 / (g2 - 3.0 + inner);
}

TEST(SizeConstraintTest, CeilingDropsFromSevenToFive) {
  // g = round(e + 1) = 4 at epsilon 1; five attributes, g1 = 16, g2 = 4.
  const int g = OlhParams::Make(1.0).g;
  ASSERT_EQ(g, 4);
  EXPECT_EQ(std::ceil(AogSizeConstraints(0.10, g, 16, 4, 5).w2), 7.0);
  EXPECT_EQ(std::ceil(AogSizeConstraints(0.15, g, 16, 4, 5).w2), 5.0);
}

TEST(SizeConstraintTest, HalvesWhenRhoDoubles) {
  for (double rho : {0.05, 0.1, 0.2}) {
    const SizeConstraints a = AogSizeConstraints(rho, 4, 16, 4, 5);
    const SizeConstraints b = AogSizeConstraints(2 * rho, 4, 16, 4, 5);
    EXPECT_NEAR(b.w1, a.w1 / 2, 1e-12);
    EXPECT_NEAR(b.w2, a.w2 / 2, 1e-12);
  }
}

TEST(SizeConstraintTest, MatchesSecondEvaluation) {
  const SizeConstraints w = AogSizeConstraints(0.1, 4, 16, 4, 5);
  EXPECT_NEAR(w.w1, W1(0.1, 4, 16, 4, 5), 1e-12);
  EXPECT_NEAR(w.w2, W2(0.1, 4, 16, 4, 5), 1e-12);
  for (int d : {2, 3, 4, 6}) {
    for (int g : {3, 4, 8}) {
      const SizeConstraints v = AogSizeConstraints(0.13, g, 32, 8, d);
      EXPECT_NEAR(v.w1, W1(0.13, g, 32, 8, d), 1e-12);
      EXPECT_NEAR(v.w2, W2(0.13, g, 32, 8, d), 1e-12);
    }
  }
}

TEST(SizeConstraintTest, InfeasibleDenominators) {
  // g2 = 2: 2 - 3 + 48 / 68 < 0.
  EXPECT_THROW(AogSizeConstraints(0.1, 4, 16, 2, 5), std::domain_error);
  EXPECT_THROW(AogSizeConstraints(0.0, 4, 16, 4, 5), std::domain_error);
}

TEST(AogFindTest, FullRangeAcceptsAConstantKey) {
  // With the whole grid in range, a constant function's key covers all 16
  // cells, so the search succeeds whenever w allows 16 cells.
  const GridSet grids = MakeGrids(2);
  const RangeQuery q{{0}, {{0, 64}}};
  const SizeConstraints w{16.0, 16.0};
  ColumnBook book(q, 2, 4);
  const std::optional<HashPair> p = AogFindHashPair(grids, grids.OneDIndex(0), q, w, book);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(MaskSize(SupportMask(grids, grids.OneDIndex(0), *p)), 16);

  const SizeConstraints too_big{17.0, 17.0};
  ColumnBook fresh(q, 2, 4);
  EXPECT_FALSE(AogFindHashPair(grids, grids.OneDIndex(0), q, too_big, fresh).has_value());
}

TEST(AogFindTest, ReturnedPairsSatisfyTheConstraints) {
  const GridSet grids = MakeGrids(3, 4000);
  const SizeConstraints w = AogSizeConstraints(0.2, 4, 16, 4, 3);
  const std::vector<RangeQuery> queries = {
      {{0, 1}, {{0, 48}, {16, 64}}},
      {{0, 1}, {{0, 48}, {16, 48}}},
      {{0}, {{0, 32}}},
      {{0, 1, 2}, {{0, 48}, {0, 48}, {16, 64}}},
  };
  int found = 0;
  for (const RangeQuery& q : queries) {
    ColumnBook book(q, 3, 4);
    std::map<int, CellMask> chosen;
    std::vector<int> order;
    for (int i = 0; i < grids.num_grids(); ++i) {
      if (grids.grid(i).kind == GridKind::kTwoD && grids.Relevant(i, q)) order.push_back(i);
    }
    for (int i = 0; i < grids.num_grids(); ++i) {
      if (grids.grid(i).kind == GridKind::kOneD && grids.Relevant(i, q)) order.push_back(i);
    }
    for (int i : order) {
      const std::optional<HashPair> p = AogFindHashPair(grids, i, q, w, book);
      if (!p) continue;
      ++found;
      const CellMask s = ScanSupport(grids, i, *p);
      EXPECT_EQ(s, SupportMask(grids, i, *p));
      EXPECT_EQ(s & ~QueryMask(grids, i, q), 0u);
      const double need = grids.grid(i).kind == GridKind::kOneD ? w.w1 : w.w2;
      EXPECT_GE(MaskSize(s), std::ceil(need));
      chosen[i] = s;
    }
    // Grids sharing a query attribute agree column by column up to one cell.
    for (int attr : q.attrs) {
      for (auto [i, si] : chosen) {
        for (auto [k, sk] : chosen) {
          if (!grids.grid(i).HasAttr(attr) || !grids.grid(k).HasAttr(attr)) continue;
          for (int j = 0; j < 4; ++j) {
            int ci = 0;
            int ck = 0;
            for (int c : grids.FractionCells(i, attr, j)) ci += (si >> c) & 1;
            for (int c : grids.FractionCells(k, attr, j)) ck += (sk >> c) & 1;
            EXPECT_LE(std::abs(ci - ck), 1);
          }
        }
      }
    }
  }
  EXPECT_GE(found, 12);
}

TEST(AogFindTest, TwoByTwoBlockHasNoValidPair) {
  // Linear hashes never put 3 or 4 of cells {1, 2, 5, 6} alone under one key.
  const GridSet grids = MakeGrids(2, 4000);
  const RangeQuery q{{0, 1}, {{0, 32}, {16, 48}}};
  ColumnBook book(q, 2, 4);
  EXPECT_FALSE(AogFindHashPair(grids, grids.TwoDIndex(0, 1), q, SizeConstraints{2.0, 3.0}, book));
}

TEST(HaogPreferenceTest, Examples) {
  const GridSet grids = MakeGrids(2);
  const int two = grids.TwoDIndex(0, 1);
  const int one = grids.OneDIndex(0);
  const CellMask query = 0b1111;
  HaogPreference p = HaogPreferenceOf(grids, two, 0b0110, query);
  EXPECT_EQ(p.primary, 0.0);
  EXPECT_EQ(p.secondary, 2.0);
  p = HaogPreferenceOf(grids, two, 0b1110000, query);
  EXPECT_EQ(p.primary, -3.0);
  p = HaogPreferenceOf(grids, one, 0b1110000, query);
  EXPECT_EQ(p.primary, -3.0 / 4);
  EXPECT_EQ(p.secondary, 3.0 / 4);
  EXPECT_LT(HaogPreference({-1, 9}), HaogPreference({0, 1}));
  EXPECT_LT(HaogPreference({0, 1}), HaogPreference({0, 2}));
}

TEST(HaogPairTest, ArgmaxMatchesScan) {
  const GridSet grids = MakeGrids(3);
  Rng rng = MakeRng(81);
  const RangeQuery q{{0, 2}, {{16, 48}, {0, 32}}};
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (!grids.Relevant(i, q)) continue;
    const CellMask query = QueryMask(grids, i, q);
    HaogPreference best{-1e9, -1e9};
    for (std::int64_t fn = 0; fn < grids.family().size(); ++fn) {
      for (int key = 0; key < grids.family().g(); ++key) {
        best = std::max(best, HaogPreferenceOf(grids, i, ScanSupport(grids, i, {fn, key}), query));
      }
    }
    for (int rep = 0; rep < 5; ++rep) {
      const HashPair p = HaogPair(grids, i, q, rng);
      EXPECT_EQ(HaogPreferenceOf(grids, i, ScanSupport(grids, i, p), query), best);
    }
  }
}

TEST(MgaGridTest, CandidatesMaximizeCoverage) {
  const GridSet grids = MakeGrids(2);
  Rng rng = MakeRng(82);
  const RangeQuery q{{0}, {{16, 48}}};
  const int i = grids.TwoDIndex(0, 1);
  const CellMask query = QueryMask(grids, i, q);
  const std::vector<HashPair> cand = MgaGridCandidates(grids, i, q);
  ASSERT_FALSE(cand.empty());
  const int top = MaskSize(ScanSupport(grids, i, cand[0]) & query);
  for (const HashPair& p : cand) EXPECT_EQ(MaskSize(ScanSupport(grids, i, p) & query), top);
  for (int k = 0; k < 100; ++k) {
    const HashPair r{static_cast<std::int64_t>(UniformIndex(rng, grids.family().size())),
                     static_cast<int>(UniformIndex(rng, 4))};
    EXPECT_LE(MaskSize(ScanSupport(grids, i, r) & query), top);
  }
  // The whole range is coverable by a constant function.
  EXPECT_EQ(top, MaskSize(query));
}

TEST(MgaGridTest, SingleCellRange) {
  const GridSet grids = MakeGrids(2);
  Rng rng = MakeRng(83);
  const RangeQuery q{{0}, {{20, 24}}};
  const int i = grids.OneDIndex(0);
  ASSERT_EQ(QueryMask(grids, i, q), CellMask{1} << 5);
  for (int k = 0; k < 20; ++k) {
    const HashPair p = MgaGridPair(grids, i, q, rng);
    EXPECT_TRUE((ScanSupport(grids, i, p) >> 5) & 1);
  }
}

std::vector<std::vector<HaogPreference>> RandomScores(Rng& rng, int grids, int functions) {
  std::vector<std::vector<HaogPreference>> s(grids, std::vector<HaogPreference>(functions));
  for (auto& row : s) {
    for (auto& p : row) {
      p.primary = -static_cast<double>(UniformIndex(rng, 4));
      p.secondary = static_cast<double>(UniformIndex(rng, 6));
    }
  }
  return s;
}

TEST(StableMatchTest, RandomTablesAreStable) {
  Rng rng = MakeRng(84);
  for (int trial = 0; trial < 50; ++trial) {
    const int grids = 1 + static_cast<int>(UniformIndex(rng, 6));
    const int functions = 1 + static_cast<int>(UniformIndex(rng, 40));
    const auto score = RandomScores(rng, grids, functions);
    std::vector<int> quota(grids);
    for (int& q : quota) q = static_cast<int>(UniformIndex(rng, 10));
    const Matching m = StableMatch(score, quota);
    EXPECT_TRUE(IsStable(score, quota, m));
    int matched = 0;
    for (int g = 0; g < grids; ++g) {
      EXPECT_LE(static_cast<int>(m.grid_functions[g].size()), quota[g]);
      matched += static_cast<int>(m.grid_functions[g].size());
    }
    int total_quota = 0;
    for (int q : quota) total_quota += q;
    EXPECT_EQ(matched, std::min(total_quota, functions));
  }
}

TEST(StableMatchTest, AuditFindsABlockingPair) {
  // Grid 0 ranks function 0 first and function 0 prefers grid 0, but the
  // matching hands it to grid 1.
  const std::vector<std::vector<HaogPreference>> score = {
      {{0, 5}, {0, 1}},
      {{0, 1}, {0, 5}},
  };
  Matching bad;
  bad.grid_functions = {{1}, {0}};
  bad.function_grid = {1, 0};
  EXPECT_FALSE(IsStable(score, {1, 1}, bad));
  EXPECT_TRUE(IsStable(score, {1, 1}, StableMatch(score, {1, 1})));
}

TEST(CappedRandomPairsTest, RespectsCap) {
  const HashFamily family = HashFamily::ForCells(16, 4, 289);
  Rng rng = MakeRng(85);
  std::vector<std::int64_t> usage(family.size(), 0);
  const std::vector<HashPair> pairs = CappedRandomPairs(family, 800, 3, usage, rng);
  std::vector<int> count(family.size(), 0);
  for (const HashPair& p : pairs) ++count[p.fn_id];
  EXPECT_LE(*std::max_element(count.begin(), count.end()), 3);
  EXPECT_THROW(CappedRandomPairs(family, 300, 0, usage, rng), std::runtime_error);
}

TEST(AaogLoadBudgetTest, EdgeCases) {
  Rng rng = MakeRng(86);
  EXPECT_EQ(AaogLoadBudget(100, 10, 50, 1, 0.1, 10, rng), 0);
  // No real users: any l with ceil(10 / l) bins and l < t qualifies.
  EXPECT_EQ(AaogLoadBudget(0, 10, 50, 6, 0.1, 10, rng), 5);
  EXPECT_THROW(AaogLoadBudget(0, 10, 0, 6, 0.1, 10, rng), std::invalid_argument);
}

TEST(AaogAttackTest, UsageCappedAndMatchingStable) {
  HdgConfig cfg;
  cfg.grid.d = 3;
  cfg.grid.g1 = 16;
  cfg.grid.g2 = 4;
  cfg.grid.domain = 64;
  const RangeQuery target{{0, 1}, {{0, 32}, {16, 48}}};
  SyntheticSpec spec;
  spec.kind = Distribution::kUniform;
  for (int seed = 0; seed < 3; ++seed) {
    Rng rng = MakeRng(87, {static_cast<std::uint64_t>(seed)});
    const std::vector<Record> data = GenSynthetic(spec, 30000, 3, 64, rng);
    AaogOptions opts;
    opts.trials = 100;
    AaogGridAttack attack(target, opts);
    const HdgRun run = RunHdg(data, cfg, &attack, 0.1, rng);
    EXPECT_TRUE(attack.stable());
    ASSERT_GE(attack.budget(), 1);
    std::map<std::int64_t, int> usage;
    for (int i = 0; i < run.grids.num_grids(); ++i) {
      for (std::size_t k = run.num_real[i]; k < run.round_pairs[i].size(); ++k) {
        ++usage[run.round_pairs[i][k].fn_id];
      }
    }
    int most = 0;
    for (auto [fn, n] : usage) most = std::max(most, n);
    EXPECT_LE(most, attack.budget());
  }
}

}  // namespace
}  // namespace ldprq
