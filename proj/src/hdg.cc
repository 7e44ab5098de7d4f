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

#include "ldprq/hdg.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "ldprq/ahead.h"
#include "ldprq/postprocess.h"

namespace ldprq {

namespace {

constexpr std::int64_t kMinFamilySize = 289;
constexpr int kMatrixIterations = 50;
constexpr int kCombineIterations = 200;
constexpr double kFitTolerance = 1e-13;

// Scales the entries listed in `cells` so they sum to `target`. A zero
// target zeroes them; a zero current sum is left alone.
double ScaleTo(std::vector<double>& v, const std::vector<int>& cells, double target) {
  double sum = 0.0;
  for (int c : cells) sum += v[c];
  if (target <= 0.0) {
    for (int c : cells) v[c] = 0.0;
    return std::abs(sum);
  }
  if (sum <= 0.0) return target;
  const double scale = target / sum;
  for (int c : cells) v[c] *= scale;
  return std::abs(sum - target);
}

}  // namespace

void HdgConfig::Validate() const {
  grid.Validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (pp_rounds < 1) throw ConfigError("pp_rounds must be at least 1");
  if (hash_family_size && *hash_family_size < 1) {
    throw ConfigError("hash family size must be positive");
  }
}

std::vector<int> AssignUserGroups(std::int64_t total, int groups, Rng& rng) {
  if (groups < 1) throw std::invalid_argument("need at least one group");
  if (total < groups) {
    throw std::invalid_argument("fewer users (" + std::to_string(total) + ") than groups (" +
                                std::to_string(groups) + ")");
  }
  std::vector<int> position(static_cast<std::size_t>(total));
  std::iota(position.begin(), position.end(), 0);
  std::shuffle(position.begin(), position.end(), rng);
  std::vector<int> group(position.size());
  for (std::size_t k = 0; k < position.size(); ++k) group[position[k]] = static_cast<int>(k % groups);
  return group;
}

void PostProcessGrids(GridSet& grids, int rounds) {
  for (int r = 0; r < rounds; ++r) {
    ApplyGridConsistency(grids);
    for (int i = 0; i < grids.num_grids(); ++i) {
      FrequencyVector& f = grids.mutable_grid(i).freqs;
      f = NormSub(f).normalized;
    }
  }
}

std::vector<HashPair> RoundPairs(const HdgRun& run) {
  std::vector<HashPair> all;
  for (const auto& pairs : run.round_pairs) all.insert(all.end(), pairs.begin(), pairs.end());
  return all;
}

HdgRun RunHdg(std::span<const Record> records, const HdgConfig& config, GridAttack* attack,
              double rho, Rng& rng) {
  config.Validate();
  const GridSpec& spec = config.grid;
  if (records.empty()) throw std::invalid_argument("HDG needs at least one user");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
  for (const Record& r : records) {
    if (static_cast<int>(r.size()) != spec.d) throw std::invalid_argument("record has wrong arity");
    for (int v : r) {
      if (v < 0 || v >= spec.domain) throw std::invalid_argument("value outside the domain");
    }
  }

  const std::int64_t num_real = static_cast<std::int64_t>(records.size());
  const std::int64_t num_fake = attack ? FakeUserCount(num_real, rho) : 0;
  const std::int64_t total = num_real + num_fake;
  const int groups = spec.num_grids();

  const std::int64_t family_size =
      config.hash_family_size
          ? *config.hash_family_size
          : std::max<std::int64_t>(kMinFamilySize, (total + groups - 1) / groups);
  const int cells = std::max(spec.g1, spec.g2 * spec.g2);
  const OlhParams params = OlhParams::Make(config.epsilon);
  const HashFamily family = HashFamily::ForCells(cells, params.g, family_size);

  Rng attack_rng(rng());
  const std::vector<int> group = AssignUserGroups(total, groups, rng);

  HdgRun run;
  run.grids = GridSet(spec, family);
  run.round_pairs.assign(groups, {});
  run.num_real.assign(groups, 0);
  run.num_fake.assign(groups, 0);
  for (std::int64_t u = 0; u < total; ++u) {
    (u < num_real ? run.num_real : run.num_fake)[group[u]]++;
  }

  for (std::int64_t u = 0; u < num_real; ++u) {
    const int i = group[u];
    const int cell = run.grids.CellOf(i, records[u]);
    run.round_pairs[i].push_back(OlhPerturb(cell, family, params, rng));
  }
  if (num_fake > 0) {
    GridAttackContext ctx;
    ctx.grids = &run.grids;
    ctx.num_fake = run.num_fake;
    ctx.num_real = run.num_real;
    ctx.params = params;
    std::vector<std::vector<HashPair>> fakes = attack->Craft(ctx, attack_rng);
    if (static_cast<int>(fakes.size()) != groups) {
      throw std::logic_error("attack returned the wrong number of grids");
    }
    for (int i = 0; i < groups; ++i) {
      if (static_cast<int>(fakes[i].size()) != run.num_fake[i]) {
        throw std::logic_error("attack returned the wrong number of pairs for a grid");
      }
      run.round_pairs[i].insert(run.round_pairs[i].end(), fakes[i].begin(), fakes[i].end());
    }
  }

  for (int i = 0; i < groups; ++i) {
    const int n = run.grids.grid(i).num_cells();
    std::vector<std::int64_t> counts(n, 0);
    for (const HashPair& p : run.round_pairs[i]) AccumulateOlh(p, family, counts);
    const std::int64_t reports = static_cast<std::int64_t>(run.round_pairs[i].size());
    run.grids.mutable_grid(i).freqs =
        reports > 0 ? OlhEstimateFromCounts(counts, reports, params) : FrequencyVector(n, 0.0);
  }
  PostProcessGrids(run.grids, config.pp_rounds);
  return run;
}

std::vector<double> ResponseMatrix(const GridSet& grids, int a, int b) {
  const GridSpec& spec = grids.spec();
  if (a >= b) throw std::invalid_argument("attribute pair must be ordered a < b");
  const int g1 = spec.g1;
  const int g2 = spec.g2;
  const int w = g1 / g2;
  const FrequencyVector& row_marg = grids.grid(grids.OneDIndex(a)).freqs;
  const FrequencyVector& col_marg = grids.grid(grids.OneDIndex(b)).freqs;
  const FrequencyVector& block = grids.grid(grids.TwoDIndex(a, b)).freqs;

  std::vector<double> m(static_cast<std::size_t>(g1) * g1);
  for (int x = 0; x < g1; ++x) {
    for (int y = 0; y < g1; ++y) m[x * g1 + y] = std::max(block[(x / w) * g2 + y / w], 0.0) / (w * w);
  }

  std::vector<std::vector<int>> rows(g1);
  std::vector<std::vector<int>> cols(g1);
  std::vector<std::vector<int>> blocks(g2 * g2);
  for (int x = 0; x < g1; ++x) {
    for (int y = 0; y < g1; ++y) {
      rows[x].push_back(x * g1 + y);
      cols[y].push_back(x * g1 + y);
      blocks[(x / w) * g2 + y / w].push_back(x * g1 + y);
    }
  }
  for (int it = 0; it < kMatrixIterations; ++it) {
    double change = 0.0;
    for (int x = 0; x < g1; ++x) change += ScaleTo(m, rows[x], std::max(row_marg[x], 0.0));
    for (int y = 0; y < g1; ++y) change += ScaleTo(m, cols[y], std::max(col_marg[y], 0.0));
    for (int c = 0; c < g2 * g2; ++c) change += ScaleTo(m, blocks[c], std::max(block[c], 0.0));
    if (change < kFitTolerance) break;
  }
  return m;
}

namespace {

// Fraction of 1-D cell x (of g1) lying inside r.
double CellFraction(int x, Interval r, const GridSpec& spec) {
  const int width = spec.domain / spec.g1;
  const Interval cell{x * width, (x + 1) * width};
  return static_cast<double>(cell.OverlapLength(r)) / width;
}

// Mass of the pair matrix with rows in (or out of) ra and columns in (or
// out of) rb.
double MatrixMass(const std::vector<double>& m, const GridSpec& spec, Interval ra, bool a_in,
                  Interval rb, bool b_in) {
  const int g1 = spec.g1;
  double total = 0.0;
  for (int x = 0; x < g1; ++x) {
    const double fx = a_in ? CellFraction(x, ra, spec) : 1.0 - CellFraction(x, ra, spec);
    if (fx == 0.0) continue;
    for (int y = 0; y < g1; ++y) {
      const double fy = b_in ? CellFraction(y, rb, spec) : 1.0 - CellFraction(y, rb, spec);
      total += fx * fy * m[x * g1 + y];
    }
  }
  return total;
}

}  // namespace

double EstimateQuery(const GridSet& grids, const RangeQuery& q) {
  const GridSpec& spec = grids.spec();
  q.Validate(spec.domain, spec.d);
  const int lambda = static_cast<int>(q.attrs.size());

  if (lambda == 1) {
    const FrequencyVector& f = grids.grid(grids.OneDIndex(q.attrs[0])).freqs;
    double total = 0.0;
    for (int x = 0; x < spec.g1; ++x) total += CellFraction(x, q.intervals[0], spec) * f[x];
    return total;
  }

  // marg[pair][in_a * 2 + in_b]
  std::vector<std::array<double, 4>> marg;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < lambda; ++i) {
    for (int j = i + 1; j < lambda; ++j) {
      const std::vector<double> m = ResponseMatrix(grids, q.attrs[i], q.attrs[j]);
      std::array<double, 4> cell{};
      for (int ia = 0; ia < 2; ++ia) {
        for (int ib = 0; ib < 2; ++ib) {
          cell[ia * 2 + ib] = MatrixMass(m, spec, q.intervals[i], ia == 1, q.intervals[j], ib == 1);
        }
      }
      marg.push_back(cell);
      pairs.emplace_back(i, j);
    }
  }
  if (lambda == 2) return marg[0][3];

  // Joint over the 2^lambda in/out patterns; bit i set = attribute i inside.
  const std::size_t states = std::size_t{1} << lambda;
  std::vector<double> joint(states, 1.0 / static_cast<double>(states));
  std::vector<std::vector<int>> members(pairs.size() * 4);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t s = 0; s < states; ++s) {
      const int ia = (s >> pairs[p].first) & 1;
      const int ib = (s >> pairs[p].second) & 1;
      members[p * 4 + ia * 2 + ib].push_back(static_cast<int>(s));
    }
  }
  for (int it = 0; it < kCombineIterations; ++it) {
    double change = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      for (int k = 0; k < 4; ++k) change += ScaleTo(joint, members[p * 4 + k], marg[p][k]);
    }
    if (change < kFitTolerance) break;
  }
  return joint[states - 1];
}

}  // namespace ldprq
