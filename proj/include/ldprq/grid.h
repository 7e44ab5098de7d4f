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

// Grid geometry shared by HDG, its post-processing and the grid attacks.
//
// Grid order: the d 1-D grids (attribute ascending), then the C(d,2) 2-D
// grids over attribute pairs (a, b), a < b, in lexicographic order.
// A 1-D cell index is x in [g1]; a 2-D cell index is r * g2 + s where r is
// the column of attribute a and s the column of attribute b.

#ifndef LDPRQ_GRID_H_
#define LDPRQ_GRID_H_

#include <vector>

#include "ldprq/olh.h"
#include "ldprq/types.h"

namespace ldprq {

struct GridSpec {
  int d = 5;
  int g1 = 16;
  int g2 = 4;
  int domain = 64;

  // Throws ConfigError on d < 2, g1 % g2 != 0, or granularities that do not
  // divide the domain.
  void Validate() const;
  int num_grids() const { return d + d * (d - 1) / 2; }
  int fraction_width() const { return domain / g2; }  // values per 2-D column
};

enum class GridKind { kOneD, kTwoD };

struct Grid {
  GridKind kind = GridKind::kOneD;
  int attr_a = 0;
  int attr_b = -1;  // -1 for 1-D grids
  FrequencyVector freqs;

  int num_cells() const { return static_cast<int>(freqs.size()); }
  bool HasAttr(int attr) const { return attr_a == attr || attr_b == attr; }
  friend bool operator==(const Grid&, const Grid&) = default;
};

class GridSet {
 public:
  GridSet() = default;
  // All frequencies start at zero.
  GridSet(const GridSpec& spec, const HashFamily& family);

  const GridSpec& spec() const { return spec_; }
  const HashFamily& family() const { return family_; }
  int num_grids() const { return static_cast<int>(grids_.size()); }
  const Grid& grid(int i) const { return grids_.at(i); }
  Grid& mutable_grid(int i) { return grids_.at(i); }
  const std::vector<Grid>& grids() const { return grids_; }

  int OneDIndex(int attr) const;
  int TwoDIndex(int a, int b) const;

  // Cell holding `record` in grid i.
  int CellOf(int i, const Record& record) const;
  // Cells of grid i lying in fraction (2-D column) j of attribute `attr`.
  std::vector<int> FractionCells(int i, int attr, int j) const;
  // Fraction index of a cell along `attr`.
  int FractionOf(int i, int attr, int cell) const;
  // Cells of grid i whose range is inside q (unconstrained attributes are
  // unrestricted). Assumes q is trimmed to column boundaries.
  std::vector<int> CellsInQuery(int i, const RangeQuery& q) const;
  // True when grid i has at least one attribute constrained by q.
  bool Relevant(int i, const RangeQuery& q) const;

  friend bool operator==(const GridSet& a, const GridSet& b);

 private:
  GridSpec spec_;
  HashFamily family_;
  std::vector<Grid> grids_;
};

// Snaps every interval outward to 2-D column boundaries.
RangeQuery TrimToColumns(const RangeQuery& q, const GridSpec& spec);

}  // namespace ldprq

#endif  // LDPRQ_GRID_H_
