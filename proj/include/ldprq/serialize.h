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

// JSON round-trips for trees, grid sets and trial records.

#ifndef LDPRQ_SERIALIZE_H_
#define LDPRQ_SERIALIZE_H_

#include <json.hpp>

#include "ldprq/experiment.h"
#include "ldprq/grid.h"
#include "ldprq/tree.h"

namespace ldprq {

nlohmann::json TreeToJson(const DecompositionTree& tree);
// Throws std::invalid_argument on structurally invalid input.
DecompositionTree TreeFromJson(const nlohmann::json& j);

nlohmann::json GridSetToJson(const GridSet& grids);
GridSet GridSetFromJson(const nlohmann::json& j);

nlohmann::json QueryToJson(const RangeQuery& q);
RangeQuery QueryFromJson(const nlohmann::json& j);

// Timings are left out: they are not reproducible.
nlohmann::json TrialToJson(const TrialResult& t);
TrialResult TrialFromJson(const nlohmann::json& j);

}  // namespace ldprq

#endif  // LDPRQ_SERIALIZE_H_
