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

// HDG: one user group per grid, OLH inside each group, cross-grid
// consistency and Norm-Sub, and response-matrix query answering.

#ifndef LDPRQ_HDG_H_
#define LDPRQ_HDG_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ldprq/grid.h"
#include "ldprq/olh.h"
#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

struct HdgConfig {
  GridSpec grid;
  double epsilon = 1.0;
  int pp_rounds = 1;
  // Minimum number of hash functions users draw from; the family is rounded
  // up to a full P^2 set. Unset: ceil((N+M)/groups), at least 289.
  std::optional<std::int64_t> hash_family_size;

  void Validate() const;  // throws ConfigError
};

// What the attacker learns before crafting: geometry, the shared hash family
// and how many fake users land in each grid's group.
struct GridAttackContext {
  const GridSet* grids = nullptr;  // frequencies are zero at this point
  std::vector<int> num_fake;       // per grid
  std::vector<int> num_real;       // per grid
  OlhParams params;
};

class GridAttack {
 public:
  virtual ~GridAttack() = default;
  // One list of pairs per grid, sized ctx.num_fake[i].
  virtual std::vector<std::vector<HashPair>> Craft(const GridAttackContext& ctx, Rng& rng) = 0;
};

struct HdgRun {
  GridSet grids;
  // Per grid: real users' pairs followed by fake users' pairs.
  std::vector<std::vector<HashPair>> round_pairs;
  std::vector<int> num_real;
  std::vector<int> num_fake;
};

// Shuffles [0, total) and deals positions round-robin: group sizes differ by
// at most one. Throws std::invalid_argument when total < groups.
std::vector<int> AssignUserGroups(std::int64_t total, int groups, Rng& rng);

// Every report of the round, grid by grid.
std::vector<HashPair> RoundPairs(const HdgRun& run);

// Real users are indices [0, N), fake users [N, N+M) with M = round(rho N /
// (1 - rho)) when an attack is given. Throws std::invalid_argument on empty
// input or records outside [0, c)^d.

HdgRun RunHdg(std::span<const Record> records, const HdgConfig& config, GridAttack* attack,
              double rho, Rng& rng);

// pp_rounds x (ApplyGridConsistency; Norm-Sub on every grid).
void PostProcessGrids(GridSet& grids, int rounds);

// g1 x g1 response matrix for the attribute pair (a, b), a < b, row-major by
// the 1-D cell of a. Fitted to both 1-D grids and the 2-D grid.
std::vector<double> ResponseMatrix(const GridSet& grids, int a, int b);

// Answer for q (attributes in the grid set, ranges in [0, c)). One attribute
// reads its 1-D grid, two read their response matrix, more combine the
// pairwise matrices by iterative proportional fitting. Throws
// std::invalid_argument on an attribute outside the set.
double EstimateQuery(const GridSet& grids, const RangeQuery& q);

}  // namespace ldprq

#endif  // LDPRQ_HDG_H_
