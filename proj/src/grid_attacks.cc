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

#include "ldprq/grid_attacks.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "ldprq/defense.h"

namespace ldprq {

namespace {

void CheckCells(const GridSet& grids, int i) {
  if (grids.grid(i).num_cells() > 64) {
    throw ConfigError("grid attacks support at most 64 cells per grid");
  }
}

// Support mask of every key of fn over grid i's cells.
std::vector<CellMask> KeyMasks(const GridSet& grids, int i, std::int64_t fn) {
  const HashFamily& family = grids.family();
  std::vector<CellMask> masks(family.g(), 0);
  const int n = grids.grid(i).num_cells();
  for (int c = 0; c < n; ++c) masks[family.Eval(fn, c)] |= CellMask{1} << c;
  return masks;
}

CellMask MaskOf(const std::vector<int>& cells) {
  CellMask m = 0;
  for (int c : cells) m |= CellMask{1} << c;
  return m;
}

// Picks uniformly among the maximizers of `score` over all (fn, key).
template <typename Score, typename Value>
std::vector<HashPair> Maximizers(const GridSet& grids, int i, Score score, Value worst) {
  std::vector<HashPair> best;
  Value best_value = worst;
  for (std::int64_t fn = 0; fn < grids.family().size(); ++fn) {
    const std::vector<CellMask> masks = KeyMasks(grids, i, fn);
    for (int key = 0; key < static_cast<int>(masks.size()); ++key) {
      const Value v = score(masks[key]);
      if (best.empty() || v > best_value) {
        best_value = v;
        best.assign(1, HashPair{fn, key});
      } else if (v == best_value) {
        best.push_back(HashPair{fn, key});
      }
    }
  }
  return best;
}

std::vector<HashPair> Repeat(const HashPair& pair, int count) {
  return std::vector<HashPair>(count, pair);
}

// Relevant grid indices in the order the constrained search visits them.
std::vector<int> SearchOrder(const GridSet& grids, const RangeQuery& q) {
  std::vector<int> order;
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (grids.grid(i).kind == GridKind::kTwoD && grids.Relevant(i, q)) order.push_back(i);
  }
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (grids.grid(i).kind == GridKind::kOneD && grids.Relevant(i, q)) order.push_back(i);
  }
  return order;
}

bool Prefers(const HaogPreference& a, std::int64_t ia, const HaogPreference& b, std::int64_t ib) {
  return a > b || (a == b && ia < ib);
}

}  // namespace

CellMask SupportMask(const GridSet& grids, int i, const HashPair& pair) {
  CheckCells(grids, i);
  return KeyMasks(grids, i, pair.fn_id).at(pair.key);
}

CellMask QueryMask(const GridSet& grids, int i, const RangeQuery& q) {
  CheckCells(grids, i);
  return MaskOf(grids.CellsInQuery(i, q));
}

std::vector<HashPair> MgaGridCandidates(const GridSet& grids, int i, const RangeQuery& q) {
  const CellMask query = QueryMask(grids, i, q);
  return Maximizers(grids, i, [&](CellMask s) { return MaskSize(s & query); }, -1);
}

HashPair MgaGridPair(const GridSet& grids, int i, const RangeQuery& q, Rng& rng) {
  const std::vector<HashPair> best = MgaGridCandidates(grids, i, q);
  return best[UniformIndex(rng, best.size())];
}

SizeConstraints AogSizeConstraints(double rho, int g, int g1, int g2, int d) {
  if (!(rho > 0.0)) throw std::domain_error("size constraints need rho > 0");
  const double scale = (0.5 - 1.0 / g) / rho;
  const double den1 = static_cast<double>(d - 1) * (g1 - 2 * g2) + g2 * g2;
  const double den2 = g2 - 3.0 + 3.0 * g1 / (static_cast<double>(g1) * (d - 1) + g2 * g2);
  if (!(den1 > 0.0) || !(den2 > 0.0)) {
    throw std::domain_error("size constraint denominator is not positive");
  }
  SizeConstraints w;
  w.w1 = scale * (static_cast<double>(d - 1) * g1 + g2 * g2) / den1;
  w.w2 = scale * g2 / den2;
  return w;
}

ColumnBook::ColumnBook(const RangeQuery& q, int d, int g2)
    : g2_(g2), tracked_(d, 0), counts_(d, std::vector<std::optional<int>>(g2)) {
  for (int attr : q.attrs) tracked_.at(attr) = 1;
}

std::optional<int> ColumnBook::Get(int attr, int column) const {
  return counts_.at(attr).at(column);
}

bool ColumnBook::Accepts(const GridSet& grids, int i, CellMask support) const {
  const Grid& g = grids.grid(i);
  for (int attr : {g.attr_a, g.attr_b}) {
    if (attr < 0 || !tracked_[attr]) continue;
    for (int j = 0; j < g2_; ++j) {
      const std::optional<int>& recorded = counts_[attr][j];
      if (!recorded) continue;
      const int x = MaskSize(support & MaskOf(grids.FractionCells(i, attr, j))) - *recorded;
      if (x != 0 && x != 1) return false;
    }
  }
  return true;
}

void ColumnBook::Record(const GridSet& grids, int i, CellMask support) {
  const Grid& g = grids.grid(i);
  for (int attr : {g.attr_a, g.attr_b}) {
    if (attr < 0 || !tracked_[attr]) continue;
    for (int j = 0; j < g2_; ++j) {
      if (!counts_[attr][j]) {
        counts_[attr][j] = MaskSize(support & MaskOf(grids.FractionCells(i, attr, j)));
      }
    }
  }
}

std::optional<HashPair> AogFindHashPair(const GridSet& grids, int i, const RangeQuery& q,
                                        const SizeConstraints& w, ColumnBook& book) {
  const CellMask query = QueryMask(grids, i, q);
  const double need = std::ceil(grids.grid(i).kind == GridKind::kOneD ? w.w1 : w.w2);
  for (std::int64_t fn = 0; fn < grids.family().size(); ++fn) {
    const std::vector<CellMask> masks = KeyMasks(grids, i, fn);
    for (int key = 0; key < static_cast<int>(masks.size()); ++key) {
      const CellMask s = masks[key];
      if ((s & ~query) != 0) continue;
      if (MaskSize(s) < need) continue;
      if (!book.Accepts(grids, i, s)) continue;
      book.Record(grids, i, s);
      return HashPair{fn, key};
    }
  }
  return std::nullopt;
}

HaogPreference HaogPreferenceOf(const GridSet& grids, int i, CellMask support, CellMask query) {
  const double size = MaskSize(support);
  HaogPreference pref{MaskSize(support & query) - size, size};
  if (grids.grid(i).kind == GridKind::kOneD) {
    const double factor = static_cast<double>(grids.spec().g1) / grids.spec().g2;
    pref.primary /= factor;
    pref.secondary /= factor;
  }
  return pref;
}

HashPair HaogPair(const GridSet& grids, int i, const RangeQuery& q, Rng& rng) {
  const CellMask query = QueryMask(grids, i, q);
  const std::vector<HashPair> best = Maximizers(
      grids, i, [&](CellMask s) { return HaogPreferenceOf(grids, i, s, query); },
      HaogPreference{});
  return best[UniformIndex(rng, best.size())];
}

int AaogLoadBudget(std::int64_t real_balls, std::int64_t fake_users, std::int64_t family_size,
                   std::int64_t t, double beta, int trials, Rng& rng) {
  if (family_size < 1) throw std::invalid_argument("family size must be positive");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (t <= 1) return 0;
  const std::int64_t max_l = t - 1;
  std::vector<int> successes(max_l + 1, 0);
  std::vector<std::int32_t> load(static_cast<std::size_t>(family_size));
  std::vector<std::int32_t> prefix_max(static_cast<std::size_t>(family_size) + 1);
  std::uniform_int_distribution<std::int64_t> pick(0, family_size - 1);
  for (int trial = 0; trial < trials; ++trial) {
    std::fill(load.begin(), load.end(), 0);
    for (std::int64_t b = 0; b < real_balls; ++b) ++load[pick(rng)];
    std::shuffle(load.begin(), load.end(), rng);
    prefix_max[0] = 0;
    for (std::int64_t k = 0; k < family_size; ++k) {
      prefix_max[k + 1] = std::max(prefix_max[k], load[k]);
    }
    for (std::int64_t l = 1; l <= max_l; ++l) {
      const std::int64_t bins = (fake_users + l - 1) / l;
      if (bins > family_size) continue;
      if (prefix_max[bins] < t - l) ++successes[l];
    }
  }
  for (std::int64_t l = max_l; l >= 1; --l) {
    if (successes[l] >= (1.0 - beta) * trials) return static_cast<int>(l);
  }
  return 0;
}

Matching StableMatch(const std::vector<std::vector<HaogPreference>>& score,
                     const std::vector<int>& quota) {
  const int grids = static_cast<int>(score.size());
  if (static_cast<int>(quota.size()) != grids) throw std::invalid_argument("one quota per grid");
  const std::int64_t functions = grids > 0 ? static_cast<std::int64_t>(score[0].size()) : 0;

  std::vector<std::vector<std::int64_t>> ranking(grids);
  for (int g = 0; g < grids; ++g) {
    if (static_cast<std::int64_t>(score[g].size()) != functions) {
      throw std::invalid_argument("ragged score table");
    }
    ranking[g].resize(functions);
    std::iota(ranking[g].begin(), ranking[g].end(), std::int64_t{0});
    std::stable_sort(ranking[g].begin(), ranking[g].end(), [&](std::int64_t a, std::int64_t b) {
      return score[g][a] > score[g][b];
    });
  }

  Matching m;
  m.grid_functions.assign(grids, {});
  m.function_grid.assign(functions, -1);
  std::vector<std::size_t> next(grids, 0);
  std::vector<int> held(grids, 0);
  std::deque<int> active;
  for (int g = 0; g < grids; ++g) {
    if (quota[g] > 0) active.push_back(g);
  }
  while (!active.empty()) {
    const int g = active.front();
    if (held[g] >= quota[g] || next[g] >= ranking[g].size()) {
      active.pop_front();
      continue;
    }
    const std::int64_t fn = ranking[g][next[g]++];
    const int current = m.function_grid[fn];
    if (current < 0) {
      m.function_grid[fn] = g;
      ++held[g];
    } else if (Prefers(score[g][fn], g, score[current][fn], current)) {
      m.function_grid[fn] = g;
      ++held[g];
      --held[current];
      active.push_back(current);
    }
  }
  for (std::int64_t fn = 0; fn < functions; ++fn) {
    if (m.function_grid[fn] >= 0) m.grid_functions[m.function_grid[fn]].push_back(fn);
  }
  for (int g = 0; g < grids; ++g) {
    std::stable_sort(m.grid_functions[g].begin(), m.grid_functions[g].end(),
                     [&](std::int64_t a, std::int64_t b) { return score[g][a] > score[g][b]; });
  }
  return m;
}

bool IsStable(const std::vector<std::vector<HaogPreference>>& score, const std::vector<int>& quota,
              const Matching& matching) {
  const int grids = static_cast<int>(score.size());
  const std::int64_t functions = static_cast<std::int64_t>(matching.function_grid.size());
  for (int g = 0; g < grids; ++g) {
    const auto& mine = matching.grid_functions[g];
    if (static_cast<int>(mine.size()) > quota[g]) return false;
    // The grid's least preferred current match.
    std::int64_t worst = -1;
    for (std::int64_t fn : mine) {
      if (matching.function_grid[fn] != g) return false;
      if (worst < 0 || Prefers(score[g][worst], worst, score[g][fn], fn)) worst = fn;
    }
    const bool has_room = static_cast<int>(mine.size()) < quota[g];
    for (std::int64_t fn = 0; fn < functions; ++fn) {
      const int holder = matching.function_grid[fn];
      if (holder == g) continue;
      const bool grid_wants = has_room || (worst >= 0 && Prefers(score[g][fn], fn, score[g][worst], worst));
      if (!grid_wants) continue;
      const bool fn_wants = holder < 0 || Prefers(score[g][fn], g, score[holder][fn], holder);
      if (fn_wants) return false;
    }
  }
  return true;
}

std::vector<HashPair> CappedRandomPairs(const HashFamily& family, int count, std::int64_t cap,
                                        std::vector<std::int64_t>& usage, Rng& rng) {
  if (static_cast<std::int64_t>(usage.size()) != family.size()) {
    throw std::invalid_argument("usage table must cover the family");
  }
  std::vector<std::int64_t> open;
  for (std::int64_t fn = 0; fn < family.size(); ++fn) {
    if (usage[fn] < cap) open.push_back(fn);
  }
  std::vector<HashPair> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    if (open.empty()) throw std::runtime_error("every hash function reached its usage cap");
    const std::size_t slot = UniformIndex(rng, open.size());
    const std::int64_t fn = open[slot];
    out.push_back(HashPair{fn, static_cast<int>(UniformIndex(rng, family.g()))});
    if (++usage[fn] >= cap) {
      open[slot] = open.back();
      open.pop_back();
    }
  }
  return out;
}

namespace {

std::vector<std::vector<HashPair>> RandomElsewhere(const GridAttackContext& ctx,
                                                   const RangeQuery& q, Rng& rng) {
  const GridSet& grids = *ctx.grids;
  std::vector<std::vector<HashPair>> out(grids.num_grids());
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (grids.Relevant(i, q)) continue;
    std::vector<std::int64_t> usage(grids.family().size(), 0);
    out[i] = CappedRandomPairs(grids.family(), ctx.num_fake[i], ctx.num_fake[i] + 1, usage, rng);
  }
  return out;
}

}  // namespace

std::vector<std::vector<HashPair>> MgaGridAttack::Craft(const GridAttackContext& ctx, Rng& rng) {
  const GridSet& grids = *ctx.grids;
  const RangeQuery q = TrimToColumns(target_, grids.spec());
  std::vector<std::vector<HashPair>> out = RandomElsewhere(ctx, q, rng);
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (!grids.Relevant(i, q)) continue;
    const std::vector<HashPair> best = MgaGridCandidates(grids, i, q);
    for (int k = 0; k < ctx.num_fake[i]; ++k) out[i].push_back(best[UniformIndex(rng, best.size())]);
  }
  return out;
}

std::vector<std::vector<HashPair>> HaogGridAttack::Craft(const GridAttackContext& ctx, Rng& rng) {
  const GridSet& grids = *ctx.grids;
  const RangeQuery q = TrimToColumns(target_, grids.spec());
  std::vector<std::vector<HashPair>> out = RandomElsewhere(ctx, q, rng);
  for (int i = 0; i < grids.num_grids(); ++i) {
    if (grids.Relevant(i, q)) out[i] = Repeat(HaogPair(grids, i, q, rng), ctx.num_fake[i]);
  }
  return out;
}

std::vector<std::vector<HashPair>> AogGridAttack::Craft(const GridAttackContext& ctx, Rng& rng) {
  const GridSet& grids = *ctx.grids;
  const GridSpec& spec = grids.spec();
  const RangeQuery q = TrimToColumns(target_, spec);
  std::vector<std::vector<HashPair>> out = RandomElsewhere(ctx, q, rng);

  std::optional<SizeConstraints> w;
  try {
    w = AogSizeConstraints(rho_, ctx.params.g, spec.g1, spec.g2, spec.d);
  } catch (const std::domain_error&) {
    w.reset();
  }
  ColumnBook book(q, spec.d, spec.g2);
  found_ = 0;
  relevant_ = 0;
  for (int i : SearchOrder(grids, q)) {
    ++relevant_;
    std::optional<HashPair> pair;
    if (w) pair = AogFindHashPair(grids, i, q, *w, book);
    if (pair) {
      ++found_;
    } else {
      pair = HaogPair(grids, i, q, rng);
    }
    out[i] = Repeat(*pair, ctx.num_fake[i]);
  }
  all_found_ = found_ == relevant_;
  return out;
}

std::vector<std::vector<HashPair>> AaogGridAttack::Craft(const GridAttackContext& ctx, Rng& rng) {
  const GridSet& grids = *ctx.grids;
  const HashFamily& family = grids.family();
  const RangeQuery q = TrimToColumns(target_, grids.spec());
  const int n = grids.num_grids();

  // The detector sees every grid's reports as one round.
  const std::int64_t real = std::accumulate(ctx.num_real.begin(), ctx.num_real.end(), std::int64_t{0});
  const std::int64_t fake = std::accumulate(ctx.num_fake.begin(), ctx.num_fake.end(), std::int64_t{0});
  const std::int64_t t = MaxLoadThreshold(real + fake, family.size(), options_.alpha);
  budget_ = AaogLoadBudget(real, fake, family.size(), t, options_.beta, options_.trials, rng);
  const std::int64_t cap = std::max(budget_, 1);

  const std::vector<int> relevant = SearchOrder(grids, q);
  std::vector<std::vector<HaogPreference>> score(relevant.size());
  std::vector<std::vector<int>> best_key(relevant.size());
  std::vector<int> quota(relevant.size());
  for (std::size_t r = 0; r < relevant.size(); ++r) {
    const int i = relevant[r];
    const CellMask query = QueryMask(grids, i, q);
    score[r].resize(family.size());
    best_key[r].resize(family.size());
    for (std::int64_t fn = 0; fn < family.size(); ++fn) {
      const std::vector<CellMask> masks = KeyMasks(grids, i, fn);
      for (int key = 0; key < static_cast<int>(masks.size()); ++key) {
        const HaogPreference p = HaogPreferenceOf(grids, i, masks[key], query);
        if (key == 0 || p > score[r][fn]) {
          score[r][fn] = p;
          best_key[r][fn] = key;
        }
      }
    }
    quota[r] = static_cast<int>((ctx.num_fake[i] + cap - 1) / cap);
  }
  const Matching matching = StableMatch(score, quota);
  stable_ = IsStable(score, quota, matching);

  std::vector<std::vector<HashPair>> out(n);
  std::vector<std::int64_t> usage(family.size(), 0);
  std::vector<int> remaining(ctx.num_fake.begin(), ctx.num_fake.end());
  for (std::size_t r = 0; r < relevant.size(); ++r) {
    const int i = relevant[r];
    for (std::int64_t fn : matching.grid_functions[r]) {
      const int use = static_cast<int>(std::min<std::int64_t>(cap, remaining[i]));
      for (int k = 0; k < use; ++k) out[i].push_back(HashPair{fn, best_key[r][fn]});
      usage[fn] += use;
      remaining[i] -= use;
    }
  }
  // Matched functions stay with their grid; everything else shares the cap.
  for (std::int64_t fn = 0; fn < family.size(); ++fn) {
    if (matching.function_grid.size() > static_cast<std::size_t>(fn) &&
        matching.function_grid[fn] >= 0) {
      usage[fn] = cap;
    }
  }
  for (int i = 0; i < n; ++i) {
    std::vector<HashPair> rest = CappedRandomPairs(family, remaining[i], cap, usage, rng);
    out[i].insert(out[i].end(), rest.begin(), rest.end());
  }
  return out;
}

}  // namespace ldprq
