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

#include "ldprq/types.h"

#include <algorithm>

namespace ldprq {

int Interval::OverlapLength(const Interval& other) const {
  return std::max(0, std::min(hi, other.hi) - std::max(lo, other.lo));
}

Interval RangeQuery::RangeOn(int attr, int domain) const {
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i] == attr) return intervals[i];
  }
  return Interval{0, domain};
}

bool RangeQuery::Constrains(int attr) const {
  return std::find(attrs.begin(), attrs.end(), attr) != attrs.end();
}

void RangeQuery::Validate(int domain, int num_attrs) const {
  if (attrs.empty()) throw std::invalid_argument("range query has no attributes");
  if (attrs.size() != intervals.size()) {
    throw std::invalid_argument("range query needs one interval per attribute");
  }
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i] < 0 || attrs[i] >= num_attrs) {
      throw std::invalid_argument("query attribute " + std::to_string(attrs[i]) +
                                  " outside [0, " + std::to_string(num_attrs) + ")");
    }
    if (i > 0 && attrs[i] <= attrs[i - 1]) {
      throw std::invalid_argument("query attributes must be sorted and distinct");
    }
    const Interval& r = intervals[i];
    if (r.lo < 0 || r.lo >= r.hi || r.hi > domain) {
      throw std::invalid_argument("query interval [" + std::to_string(r.lo) + ", " +
                                  std::to_string(r.hi) + ") outside the domain");
    }
  }
}

}  // namespace ldprq
