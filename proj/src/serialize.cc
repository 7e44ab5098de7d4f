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

#include "ldprq/serialize.h"

#include <stdexcept>
#include <string>

namespace ldprq {

using nlohmann::json;

namespace {

template <typename T>
json Optional(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> ReadOptional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

json TreeToJson(const DecompositionTree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes()) {
    nodes.push_back({{"lo", n.interval.lo},
                     {"hi", n.interval.hi},
                     {"f_hat", n.f_hat},
                     {"f_tilde", n.f_tilde},
                     {"parent", n.parent}});
  }
  return {{"domain", tree.domain()}, {"fanout", tree.fanout()}, {"nodes", std::move(nodes)}};
}

DecompositionTree TreeFromJson(const json& j) {
  try {
    DecompositionTree tree(j.at("domain").get<int>());
    tree.set_fanout(j.at("fanout").get<int>());
    const json& nodes = j.at("nodes");
    if (!nodes.is_array() || nodes.empty()) throw std::invalid_argument("tree has no nodes");
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      const json& n = nodes[id];
      const Interval iv{n.at("lo").get<int>(), n.at("hi").get<int>()};
      const int parent = n.at("parent").get<int>();
      if (id == 0) {
        if (parent != -1 || iv != tree.node(0).interval) {
          throw std::invalid_argument("first node must be the root");
        }
      } else {
        if (parent < 0 || parent >= static_cast<int>(id)) {
          throw std::invalid_argument("parent must precede its child");
        }
        tree.AddChild(parent, iv);
      }
      TreeNode& node = tree.mutable_node(static_cast<int>(id));
      node.f_hat = n.at("f_hat").get<double>();
      node.f_tilde = n.at("f_tilde").get<double>();
    }
    return tree;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed tree JSON: ") + e.what());
  }
}

json GridSetToJson(const GridSet& grids) {
  const GridSpec& s = grids.spec();
  const HashFamily& f = grids.family();
  json list = json::array();
  for (const Grid& g : grids.grids()) {
    list.push_back({{"attrs", g.attr_b < 0 ? json::array({g.attr_a}) : json::array({g.attr_a, g.attr_b})},
                    {"freqs", g.freqs}});
  }
  return {{"config", {{"d", s.d}, {"g1", s.g1}, {"g2", s.g2}, {"domain", s.domain}}},
          {"family",
           {{"prime", f.prime()}, {"g", f.g()}, {"size", f.size()}, {"num_cells", f.num_cells()}}},
          {"grids", std::move(list)}};
}

GridSet GridSetFromJson(const json& j) {
  try {
    const json& c = j.at("config");
    GridSpec spec;
    spec.d = c.at("d").get<int>();
    spec.g1 = c.at("g1").get<int>();
    spec.g2 = c.at("g2").get<int>();
    spec.domain = c.at("domain").get<int>();
    const json& f = j.at("family");
    const HashFamily family(f.at("prime").get<std::int64_t>(), f.at("g").get<int>(),
                            f.at("size").get<std::int64_t>(), f.at("num_cells").get<int>());
    GridSet grids(spec, family);
    const json& list = j.at("grids");
    if (!list.is_array() || static_cast<int>(list.size()) != grids.num_grids()) {
      throw std::invalid_argument("grid count does not match the configuration");
    }
    for (int i = 0; i < grids.num_grids(); ++i) {
      const std::vector<int> attrs = list[i].at("attrs").get<std::vector<int>>();
      const Grid& g = grids.grid(i);
      const std::vector<int> expected =
          g.attr_b < 0 ? std::vector<int>{g.attr_a} : std::vector<int>{g.attr_a, g.attr_b};
      if (attrs != expected) throw std::invalid_argument("grid attributes out of order");
      FrequencyVector freqs = list[i].at("freqs").get<FrequencyVector>();
      if (static_cast<int>(freqs.size()) != g.num_cells()) {
        throw std::invalid_argument("grid has the wrong number of cells");
      }
      grids.mutable_grid(i).freqs = std::move(freqs);
    }
    return grids;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed grid JSON: ") + e.what());
  }
}

json QueryToJson(const RangeQuery& q) {
  json ranges = json::array();
  for (const Interval& r : q.intervals) ranges.push_back({r.lo, r.hi});
  return {{"attrs", q.attrs}, {"ranges", std::move(ranges)}};
}

RangeQuery QueryFromJson(const json& j) {
  try {
    RangeQuery q;
    q.attrs = j.at("attrs").get<std::vector<int>>();
    for (const json& r : j.at("ranges")) {
      q.intervals.push_back(Interval{r.at(0).get<int>(), r.at(1).get<int>()});
    }
    if (q.attrs.size() != q.intervals.size()) {
      throw std::invalid_argument("query needs one range per attribute");
    }
    return q;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed query JSON: ") + e.what());
  }
}

json TrialToJson(const TrialResult& t) {
  return {{"seed", t.seed},
          {"query_id", t.query_id},
          {"query", QueryToJson(t.query)},
          {"true_frequency", t.true_frequency},
          {"honest_response", t.honest_response},
          {"poisoned_response", t.poisoned_response},
          {"efficiency", Optional(t.efficiency)},
          {"honest_detected", Optional(t.honest_detected)},
          {"poisoned_detected", Optional(t.poisoned_detected)},
          {"aog_all_found", Optional(t.aog_all_found)},
          {"aaog_budget", Optional(t.aaog_budget)}};
}

TrialResult TrialFromJson(const json& j) {
  try {
    TrialResult t;
    t.seed = j.at("seed").get<std::uint64_t>();
    t.query_id = j.at("query_id").get<int>();
    t.query = QueryFromJson(j.at("query"));
    t.true_frequency = j.at("true_frequency").get<double>();
    t.honest_response = j.at("honest_response").get<double>();
    t.poisoned_response = j.at("poisoned_response").get<double>();
    t.efficiency = ReadOptional<double>(j, "efficiency");
    t.honest_detected = ReadOptional<bool>(j, "honest_detected");
    t.poisoned_detected = ReadOptional<bool>(j, "poisoned_detected");
    t.aog_all_found = ReadOptional<bool>(j, "aog_all_found");
    t.aaog_budget = ReadOptional<int>(j, "aaog_budget");
    return t;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed trial JSON: ") + e.what());
  }
}

}  // namespace ldprq
