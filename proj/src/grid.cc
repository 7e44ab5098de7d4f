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

#include "ldprq/grid.h"

#include <stdexcept>
#include <string>
#include <utility>

namespace ldprq {

void GridSpec::Validate() const {
  if (d < 2) throw ConfigError("HDG needs at least two attributes");
  if (g1 < 1 || g2 < 1) throw ConfigError("grid granularities must be positive");
  if (g1 % g2 != 0) {
    throw ConfigError("g1 (" + std::to_string(g1) + ") must be divisible by g2 (" +
                      std::to_string(g2) + ")");
  }
  if (domain % g1 != 0 || domain % g2 != 0) {
    throw ConfigError("g1 and g2 must divide the domain size " + std::to_string(domain));
  }
}

GridSet::GridSet(const GridSpec& spec, const HashFamily& family) : spec_(spec), family_(family) {
  spec_.Validate();
  for (int a = 0; a < spec_.d; ++a) {
    grids_.push_back(Grid{GridKind::kOneD, a, -1, FrequencyVector(spec_.g1, 0.0)});
  }
  for (int a = 0; a < spec_.d; ++a) {
    for (int b = a + 1; b < spec_.d; ++b) {
      grids_.push_back(Grid{GridKind::kTwoD, a, b, FrequencyVector(spec_.g2 * spec_.g2, 0.0)});
    }
  }
}

int GridSet::OneDIndex(int attr) const {
  if (attr < 0 || attr >= spec_.d) throw std::out_of_range("attribute outside the grid set");
  return attr;
}

int GridSet::TwoDIndex(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a < 0 || b >= spec_.d || a == b) throw std::out_of_range("bad attribute pair");
  // Pairs before row a: sum_{r<a} (d - 1 - r).
  const int before = a * (2 * spec_.d - a - 1) / 2;
  return spec_.d + before + (b - a - 1);
}

int GridSet::CellOf(int i, const Record& record) const {
  const Grid& g = grid(i);
  if (g.kind == GridKind::kOneD) return record.at(g.attr_a) * spec_.g1 / spec_.domain;
  const int r = record.at(g.attr_a) * spec_.g2 / spec_.domain;
  const int s = record.at(g.attr_b) * spec_.g2 / spec_.domain;
  return r * spec_.g2 + s;
}

std::vector<int> GridSet::FractionCells(int i, int attr, int j) const {
  const Grid& g = grid(i);
  std::vector<int> cells;
  if (g.kind == GridKind::kOneD) {
    const int width = spec_.g1 / spec_.g2;
    for (int x = j * width; x < (j + 1) * width; ++x) cells.push_back(x);
  } else if (attr == g.attr_a) {
    for (int s = 0; s < spec_.g2; ++s) cells.push_back(j * spec_.g2 + s);
  } else if (attr == g.attr_b) {
    for (int r = 0; r < spec_.g2; ++r) cells.push_back(r * spec_.g2 + j);
  } else {
    throw std::invalid_argument("grid does not contain the attribute");
  }
  return cells;
}

int GridSet::FractionOf(int i, int attr, int cell) const {
  const Grid& g = grid(i);
  if (g.kind == GridKind::kOneD) return cell / (spec_.g1 / spec_.g2);
  return attr == g.attr_a ? cell / spec_.g2 : cell % spec_.g2;
}

std::vector<int> GridSet::CellsInQuery(int i, const RangeQuery& q) const {
  const Grid& g = grid(i);
  std::vector<int> cells;
  if (g.kind == GridKind::kOneD) {
    const Interval r = q.RangeOn(g.attr_a, spec_.domain);
    const int width = spec_.domain / spec_.g1;
    for (int x = 0; x < spec_.g1; ++x) {
      if (r.Covers(Interval{x * width, (x + 1) * width})) cells.push_back(x);
    }
    return cells;
  }
  const Interval ra = q.RangeOn(g.attr_a, spec_.domain);
  const Interval rb = q.RangeOn(g.attr_b, spec_.domain);
  const int width = spec_.fraction_width();
  for (int r = 0; r < spec_.g2; ++r) {
    if (!ra.Covers(Interval{r * width, (r + 1) * width})) continue;
    for (int s = 0; s < spec_.g2; ++s) {
      if (rb.Covers(Interval{s * width, (s + 1) * width})) cells.push_back(r * spec_.g2 + s);
    }
  }
  return cells;
}

bool GridSet::Relevant(int i, const RangeQuery& q) const {
  const Grid& g = grid(i);
  return q.Constrains(g.attr_a) || (g.attr_b >= 0 && q.Constrains(g.attr_b));
}

bool operator==(const GridSet& a, const GridSet& b) {
  return a.spec_.d == b.spec_.d && a.spec_.g1 == b.spec_.g1 && a.spec_.g2 == b.spec_.g2 &&
         a.spec_.domain == b.spec_.domain && a.family_.prime() == b.family_.prime() &&
         a.family_.g() == b.family_.g() && a.family_.size() == b.family_.size() &&
         a.family_.num_cells() == b.family_.num_cells() && a.grids_ == b.grids_;
}

RangeQuery TrimToColumns(const RangeQuery& q, const GridSpec& spec) {
  RangeQuery out = q;
  const int width = spec.fraction_width();
  for (Interval& r : out.intervals) {
    r.lo = (r.lo / width) * width;
    r.hi = ((r.hi + width - 1) / width) * width;
  }
  return out;
}

}  // namespace ldprq
