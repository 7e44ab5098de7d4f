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

#ifndef LDPRQ_TYPES_H_
#define LDPRQ_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldprq {

// Real-valued frequencies over an indexed set of tree nodes or grid cells.
// Entries may be negative before normalization.
using FrequencyVector = std::vector<double>;

// One user's value: one coordinate per attribute, each in [0, c).
using Record = std::vector<int>;

// Half-open interval [lo, hi).
struct Interval {
  int lo = 0;
  int hi = 0;

  int length() const { return hi - lo; }
  bool Contains(int x) const { return lo <= x && x < hi; }
  bool Covers(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
  bool Intersects(const Interval& other) const { return lo < other.hi && other.lo < hi; }
  int OverlapLength(const Interval& other) const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// A range query over a subset of attributes. `attrs[i]` is constrained to
// `intervals[i]`.
struct RangeQuery {
  std::vector<int> attrs;
  std::vector<Interval> intervals;

  // Interval on `attr`, or the full domain [0, domain) if unconstrained.
  Interval RangeOn(int attr, int domain) const;
  bool Constrains(int attr) const;
  // Validates the invariants: non-empty, sorted distinct attributes,
  // 0 <= lo < hi <= domain. Throws std::invalid_argument.
  void Validate(int domain, int num_attrs) const;

  friend bool operator==(const RangeQuery&, const RangeQuery&) = default;
};

// Raised for configuration problems the caller can fix.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldprq

#endif  // LDPRQ_TYPES_H_
