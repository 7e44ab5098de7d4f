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

// Poisoning attacks against HDG. Supports and query ranges are handled as
// cell bitmasks, so grids are limited to 64 cells.

#ifndef LDPRQ_GRID_ATTACKS_H_
#define LDPRQ_GRID_ATTACKS_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ldprq/grid.h"
#include "ldprq/hdg.h"
#include "ldprq/olh.h"
#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

using CellMask = std::uint64_t;

inline int MaskSize(CellMask m) { return __builtin_popcountll(m); }

// Cells of grid i whose hash under fn_id equals key.
CellMask SupportMask(const GridSet& grids, int i, const HashPair& pair);
// Cells of grid i inside q.
CellMask QueryMask(const GridSet& grids, int i, const RangeQuery& q);

// Every pair maximizing |S cap R| on grid i.
std::vector<HashPair> MgaGridCandidates(const GridSet& grids, int i, const RangeQuery& q);
HashPair MgaGridPair(const GridSet& grids, int i, const RangeQuery& q, Rng& rng);

struct SizeConstraints {
  double w1 = 0.0;  // minimum support on a 1-D grid
  double w2 = 0.0;  // minimum support on a 2-D grid
};

// Throws std::domain_error when either denominator is not positive.
SizeConstraints AogSizeConstraints(double rho, int g, int g1, int g2, int d);

// Per query attribute and column, the support count recorded by the first
// grid that fixed it. Attributes the query leaves free are not tracked.
class ColumnBook {
 public:
  ColumnBook(const RangeQuery& q, int d, int g2);
  std::optional<int> Get(int attr, int column) const;
  // True when every shared column count equals the record or exceeds it by 1.
  bool Accepts(const GridSet& grids, int i, CellMask support) const;
  // Records counts for columns not yet defined.
  void Record(const GridSet& grids, int i, CellMask support);

 private:
  int g2_;
  std::vector<char> tracked_;
  std::vector<std::vector<std::optional<int>>> counts_;
};

// First pair (fn ascending, key ascending) whose support lies inside the
// query, has at least ceil(w) cells, and passes the column book; the book
// is updated on success.
std::optional<HashPair> AogFindHashPair(const GridSet& grids, int i, const RangeQuery& q,
                                        const SizeConstraints& w, ColumnBook& book);

struct HaogPreference {
  double primary = 0.0;    // -(cells outside the query), scaled on 1-D grids
  double secondary = 0.0;  // support size, scaled on 1-D grids
  friend auto operator<=>(const HaogPreference&, const HaogPreference&) = default;
};

HaogPreference HaogPreferenceOf(const GridSet& grids, int i, CellMask support, CellMask query);
// Argmax over the family, ties broken uniformly.
HashPair HaogPair(const GridSet& grids, int i, const RangeQuery& q, Rng& rng);

// Largest l such that, with probability >= 1 - beta over `trials`
// simulations, the heaviest of ceil(fake_users / l) randomly drawn bins
// holds fewer than t - l of `real_balls` uniformly thrown balls. Returns 0
// when no l qualifies.
int AaogLoadBudget(std::int64_t real_balls, std::int64_t fake_users, std::int64_t family_size,
                   std::int64_t t, double beta, int trials, Rng& rng);

// Many-to-one matching of hash functions to grids. Both sides rank by
// score[grid][fn]; ties favor the lower index.
struct Matching {
  std::vector<std::vector<std::int64_t>> grid_functions;
  std::vector<int> function_grid;  // -1 when unmatched
};
Matching StableMatch(const std::vector<std::vector<HaogPreference>>& score,
                     const std::vector<int>& quota);
// No grid and function would both rather be matched to each other.
bool IsStable(const std::vector<std::vector<HaogPreference>>& score, const std::vector<int>& quota,
              const Matching& matching);

class MgaGridAttack : public GridAttack {
 public:
  explicit MgaGridAttack(RangeQuery target) : target_(std::move(target)) {}
  std::vector<std::vector<HashPair>> Craft(const GridAttackContext& ctx, Rng& rng) override;

 private:
  RangeQuery target_;
};

class HaogGridAttack : public GridAttack {
 public:
  explicit HaogGridAttack(RangeQuery target) : target_(std::move(target)) {}
  std::vector<std::vector<HashPair>> Craft(const GridAttackContext& ctx, Rng& rng) override;

 private:
  RangeQuery target_;
};

class AogGridAttack : public GridAttack {
 public:
  // rho is the attacker's fake fraction, used for the size constraints.
  AogGridAttack(RangeQuery target, double rho) : target_(std::move(target)), rho_(rho) {}
  std::vector<std::vector<HashPair>> Craft(const GridAttackContext& ctx, Rng& rng) override;

  // Relevant grids where the constrained search succeeded, last run.
  bool all_found() const { return all_found_; }
  int found() const { return found_; }
  int relevant() const { return relevant_; }

 private:
  RangeQuery target_;
  double rho_;
  bool all_found_ = false;
  int found_ = 0;
  int relevant_ = 0;
};

struct AaogOptions {
  double alpha = 0.005;  // the detector's significance level
  double beta = 0.1;     // tolerated detection probability
  int trials = 200;
};

class AaogGridAttack : public GridAttack {
 public:
  AaogGridAttack(RangeQuery target, AaogOptions options)
      : target_(std::move(target)), options_(options) {}
  std::vector<std::vector<HashPair>> Craft(const GridAttackContext& ctx, Rng& rng) override;

  // Most fake users per hash function, counted over the whole round.
  int budget() const { return budget_; }
  bool stable() const { return stable_; }

 private:
  RangeQuery target_;
  AaogOptions options_;
  int budget_ = 0;
  bool stable_ = true;
};

// Uniform (fn, key) pairs, each function used at most `cap` times per call.
std::vector<HashPair> CappedRandomPairs(const HashFamily& family, int count, std::int64_t cap,
                                        std::vector<std::int64_t>& usage, Rng& rng);

}  // namespace ldprq

#endif  // LDPRQ_GRID_ATTACKS_H_
