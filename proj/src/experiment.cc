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

#include "ldprq/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>

#include "ldprq/ahead.h"
#include "ldprq/grid_attacks.h"
#include "ldprq/hdg.h"
#include "ldprq/metrics.h"
#include "ldprq/serialize.h"

namespace ldprq {

namespace {

// Stream labels for MakeRng.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kQueryStream = 2;
constexpr std::uint64_t kProtocolStream = 3;

template <typename Enum>
struct NameTable {
  Enum value;
  const char* name;
};

constexpr NameTable<Protocol> kProtocols[] = {{Protocol::kAhead, "ahead"}, {Protocol::kHdg, "hdg"}};
constexpr NameTable<AttackKind> kAttacks[] = {
    {AttackKind::kNone, "none"}, {AttackKind::kMga, "mga"},   {AttackKind::kAot, "aot"},
    {AttackKind::kAaot, "aaot"}, {AttackKind::kHaog, "haog"}, {AttackKind::kAog, "aog"},
    {AttackKind::kAaog, "aaog"}};
constexpr NameTable<ZeroCoefStrategy> kStrategies[] = {{ZeroCoefStrategy::kZero, "zero"},
                                                       {ZeroCoefStrategy::kOne, "one"},
                                                       {ZeroCoefStrategy::kPath, "path"}};
constexpr NameTable<TailMass> kTails[] = {{TailMass::kNominal, "nominal"},
                                          {TailMass::kExact, "exact"},
                                          {TailMass::kInside, "inside"}};

template <typename Enum, std::size_t N>
Enum Lookup(const NameTable<Enum> (&table)[N], const std::string& name, const char* what) {
  std::string options;
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
    options += options.empty() ? "" : "|";
    options += entry.name;
  }
  throw ConfigError(std::string("unknown ") + what + " '" + name + "' (expected " + options + ")");
}

template <typename Enum, std::size_t N>
std::string NameOf(const NameTable<Enum> (&table)[N], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "unknown";
}

void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

bool IsTreeAttack(AttackKind a) {
  return a == AttackKind::kNone || a == AttackKind::kMga || a == AttackKind::kAot ||
         a == AttackKind::kAaot;
}

bool IsGridAttack(AttackKind a) {
  return a == AttackKind::kNone || a == AttackKind::kMga || a == AttackKind::kHaog ||
         a == AttackKind::kAog || a == AttackKind::kAaog;
}

AheadConfig MakeAheadConfig(const ExperimentConfig& c) {
  AheadConfig a;
  a.domain_size = c.resolved_domain();
  a.fanout = c.fanout;
  a.epsilon = c.epsilon;
  a.split_threshold = c.split_threshold;
  return a;
}

HdgConfig MakeHdgConfig(const ExperimentConfig& c) {
  HdgConfig h;
  h.grid.d = c.dims;
  h.grid.g1 = c.g1;
  h.grid.g2 = c.g2;
  h.grid.domain = c.resolved_domain();
  h.epsilon = c.epsilon;
  h.pp_rounds = c.pp_rounds;
  h.hash_family_size = c.hash_family_size;
  return h;
}

bool AnyTreeRoundFlagged(const AheadRun& run, const ExperimentConfig& c) {
  const TreeDefenseParams params{c.alpha, c.tail};
  for (const LayerRound& round : run.rounds) {
    const OueParams oue = OueParams::Make(c.epsilon, round.vector_length);
    if (TreeDetect(round.ones_counts, round.vector_length, oue.q, params).detected) return true;
  }
  return false;
}

bool GridRoundFlagged(const HdgRun& run, const ExperimentConfig& c) {
  return GridDetect(RoundPairs(run), run.grids.family().size(), c.alpha).detected;
}

struct SeedState {
  std::vector<Record> records;
  std::vector<int> values;  // attribute 0, for AHEAD
  std::vector<RangeQuery> queries;
  std::vector<double> honest;
  std::optional<bool> honest_detected;
  double honest_seconds = 0.0;
};

double Answer(const ExperimentConfig& c, const AheadRun* tree, const HdgRun* grid,
              const RangeQuery& q) {
  if (c.protocol == Protocol::kAhead) return EstimateQuery(tree->tree, q.intervals.at(0));
  return EstimateQuery(grid->grids, q);
}

}  // namespace

Protocol ParseProtocol(const std::string& name) { return Lookup(kProtocols, name, "protocol"); }
std::string ProtocolName(Protocol p) { return NameOf(kProtocols, p); }
AttackKind ParseAttack(const std::string& name) { return Lookup(kAttacks, name, "attack"); }
std::string AttackName(AttackKind a) { return NameOf(kAttacks, a); }
ZeroCoefStrategy ParseStrategy(const std::string& name) {
  return Lookup(kStrategies, name, "strategy");
}
std::string StrategyName(ZeroCoefStrategy s) { return NameOf(kStrategies, s); }
TailMass ParseTailMass(const std::string& name) { return Lookup(kTails, name, "tail mass"); }
std::string TailMassName(TailMass t) { return NameOf(kTails, t); }

int ExperimentConfig::resolved_domain() const {
  if (domain) return *domain;
  return protocol == Protocol::kAhead ? 1024 : 64;
}

int ExperimentConfig::resolved_query_dims() const {
  if (query_dims) return *query_dims;
  return protocol == Protocol::kAhead ? 1 : 3;
}

double ExperimentConfig::resolved_mean() const {
  return mean ? *mean : resolved_domain() / 2.0;
}

double ExperimentConfig::resolved_stddev() const {
  return stddev ? *stddev : 40.0 * resolved_domain() / 1024.0;
}

void ExperimentConfig::Validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
  if (num_users < 1) throw ConfigError("num_users must be positive");
  if (num_queries < 1) throw ConfigError("num_queries must be positive");
  if (num_seeds < 1) throw ConfigError("num_seeds must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (assumed_users < 0) throw ConfigError("assumed_users must be non-negative");
  if (stddev && !(*stddev >= 0.0)) throw ConfigError("stddev must be non-negative");
  if (!csv_path.empty() && csv_columns.empty()) {
    throw ConfigError("csv_columns must name the columns to load");
  }
  if (protocol == Protocol::kAhead) {
    if (!IsTreeAttack(attack)) {
      throw ConfigError("attack '" + AttackName(attack) + "' does not apply to AHEAD");
    }
    if (resolved_query_dims() != 1) throw ConfigError("AHEAD answers 1-dimensional queries only");
    MakeAheadConfig(*this).Validate();
  } else {
    if (!IsGridAttack(attack)) {
      throw ConfigError("attack '" + AttackName(attack) + "' does not apply to HDG");
    }
    const HdgConfig h = MakeHdgConfig(*this);
    h.Validate();
    if (resolved_query_dims() < 1 || resolved_query_dims() > dims) {
      throw ConfigError("query_dims must lie in [1, dims]");
    }
    if (num_users < h.grid.num_grids()) throw ConfigError("HDG needs at least one user per grid");
    if (!csv_path.empty() && static_cast<int>(csv_columns.size()) != dims) {
      throw ConfigError("HDG needs exactly dims CSV columns");
    }
  }
  if (resolved_domain() < 8) throw ConfigError("domain must be at least 8");
}

ExperimentOutput RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  const int domain = config.resolved_domain();
  const bool ahead = config.protocol == Protocol::kAhead;
  const int data_dims = ahead ? 1 : config.dims;

  std::optional<CsvLoadResult> csv;
  if (!config.csv_path.empty()) csv = LoadCsv(config.csv_path, config.csv_columns, domain);

  const AheadConfig ahead_cfg = ahead ? MakeAheadConfig(config) : AheadConfig{};
  const HdgConfig hdg_cfg = ahead ? HdgConfig{} : MakeHdgConfig(config);
  const std::int64_t assumed =
      config.assumed_users > 0 ? config.assumed_users : config.num_users;

  std::vector<SeedState> seeds(config.num_seeds);
  ParallelFor(seeds.size(), config.threads, [&](std::size_t s) {
    const std::uint64_t seed = config.seed + s;
    SeedState& st = seeds[s];
    if (csv) {
      st.records = csv->records;
    } else {
      Rng data_rng = MakeRng(seed, {kDataStream});
      SyntheticSpec spec{config.distribution, config.resolved_mean(), config.resolved_stddev()};
      st.records = GenSynthetic(spec, static_cast<std::size_t>(config.num_users), data_dims, domain,
                                data_rng);
    }
    if (ahead) st.values = Column(st.records, 0);
    Rng query_rng = MakeRng(seed, {kQueryStream});
    st.queries = GenQueries(config.num_queries, domain, data_dims, config.resolved_query_dims(),
                            query_rng);
    if (!ahead) {
      for (RangeQuery& q : st.queries) q = TrimToColumns(q, hdg_cfg.grid);
    }

    const auto start = std::chrono::steady_clock::now();
    Rng rng = MakeRng(seed, {kProtocolStream});
    if (ahead) {
      const AheadRun run = RunAhead(st.values, ahead_cfg, nullptr, config.rho, rng);
      for (const RangeQuery& q : st.queries) st.honest.push_back(Answer(config, &run, nullptr, q));
      if (config.defense) st.honest_detected = AnyTreeRoundFlagged(run, config);
    } else {
      const HdgRun run = RunHdg(st.records, hdg_cfg, nullptr, config.rho, rng);
      for (const RangeQuery& q : st.queries) st.honest.push_back(Answer(config, nullptr, &run, q));
      if (config.defense) st.honest_detected = GridRoundFlagged(run, config);
    }
    st.honest_seconds = Seconds(start);
  });

  const std::size_t per_seed = static_cast<std::size_t>(config.num_queries);
  std::vector<TrialResult> trials(seeds.size() * per_seed);
  ParallelFor(trials.size(), config.threads, [&](std::size_t k) {
    const std::size_t s = k / per_seed;
    const int qi = static_cast<int>(k % per_seed);
    const SeedState& st = seeds[s];
    const RangeQuery& q = st.queries[qi];
    TrialResult& t = trials[k];
    t.seed = config.seed + s;
    t.query_id = qi;
    t.query = q;
    t.true_frequency = ahead ? TrueFrequency(st.values, q.intervals[0]) : TrueFrequency(st.records, q);
    t.honest_response = st.honest[qi];
    t.honest_detected = st.honest_detected;
    t.honest_seconds = st.honest_seconds;

    const auto start = std::chrono::steady_clock::now();
    Rng rng = MakeRng(t.seed, {kProtocolStream});
    if (config.attack == AttackKind::kNone) {
      t.poisoned_response = t.honest_response;
      t.poisoned_detected = st.honest_detected;
    } else if (ahead) {
      std::unique_ptr<TreeAttack> attack;
      const Interval target = q.intervals[0];
      if (config.attack == AttackKind::kMga) {
        attack = std::make_unique<MgaTreeAttack>(target);
      } else {
        AotOptions opts;
        opts.strategy = config.strategy;
        opts.assumed_real_users = assumed;
        opts.adaptive = config.attack == AttackKind::kAaot;
        attack = std::make_unique<AotTreeAttack>(target, opts);
      }
      const AheadRun run = RunAhead(st.values, ahead_cfg, attack.get(), config.rho, rng);
      t.poisoned_response = Answer(config, &run, nullptr, q);
      if (config.defense) t.poisoned_detected = AnyTreeRoundFlagged(run, config);
    } else {
      std::unique_ptr<GridAttack> attack;
      AogGridAttack* aog = nullptr;
      AaogGridAttack* aaog = nullptr;
      switch (config.attack) {
        case AttackKind::kMga:
          attack = std::make_unique<MgaGridAttack>(q);
          break;
        case AttackKind::kHaog:
          attack = std::make_unique<HaogGridAttack>(q);
          break;
        case AttackKind::kAog: {
          auto a = std::make_unique<AogGridAttack>(q, config.rho);
          aog = a.get();
          attack = std::move(a);
          break;
        }
        default: {
          AaogOptions opts;
          opts.alpha = config.alpha;
          opts.beta = config.beta;
          auto a = std::make_unique<AaogGridAttack>(q, opts);
          aaog = a.get();
          attack = std::move(a);
          break;
        }
      }
      const HdgRun run = RunHdg(st.records, hdg_cfg, attack.get(), config.rho, rng);
      t.poisoned_response = Answer(config, nullptr, &run, q);
      if (config.defense) t.poisoned_detected = GridRoundFlagged(run, config);
      if (aog && config.rho > 0.0) t.aog_all_found = aog->all_found();
      if (aaog) t.aaog_budget = aaog->budget();
    }
    t.poisoned_seconds = Seconds(start);
    if (config.rho > 0.0) t.efficiency = Efficiency(t.honest_response, t.poisoned_response, config.rho);
  });

  ExperimentOutput out;
  out.trials = std::move(trials);
  out.summary = Summarize(config, out.trials);
  if (!config.output.empty()) WriteOutputs(config.output, out.trials, {out.summary});
  return out;
}

namespace {

void MeanStd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string Num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string OptNum(const std::optional<double>& x) { return x ? Num(*x) : ""; }

}  // namespace

Summary Summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials) {
  Summary s;
  s.protocol = ProtocolName(config.protocol);
  s.attack = AttackName(config.attack);
  s.epsilon = config.epsilon;
  s.rho = config.rho;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> truth;
  std::vector<double> honest;
  std::vector<double> poisoned;
  std::vector<double> eff;
  int flagged = 0;
  int flagged_honest = 0;
  int checked = 0;
  for (const TrialResult& t : trials) {
    truth.push_back(t.true_frequency);
    honest.push_back(t.honest_response);
    poisoned.push_back(t.poisoned_response);
    if (t.efficiency) eff.push_back(*t.efficiency);
    if (t.poisoned_detected) {
      ++checked;
      flagged += *t.poisoned_detected ? 1 : 0;
      flagged_honest += t.honest_detected.value_or(false) ? 1 : 0;
    }
  }
  double unused = 0.0;
  MeanStd(truth, s.mean_true, unused);
  MeanStd(honest, s.mean_honest, s.std_honest);
  MeanStd(poisoned, s.mean_poisoned, s.std_poisoned);
  MeanStd(eff, s.mean_efficiency, s.std_efficiency);
  if (checked > 0) {
    s.detection_rate = static_cast<double>(flagged) / checked;
    s.honest_detection_rate = static_cast<double>(flagged_honest) / checked;
  }
  return s;
}

std::string SummaryCsvHeader() {
  return "protocol,attack,epsilon,rho,trials,mean_true,mean_honest,std_honest,mean_poisoned,"
         "std_poisoned,mean_efficiency,std_efficiency,detection_rate,honest_detection_rate";
}

std::string SummaryCsvRow(const Summary& s) {
  return s.protocol + "," + s.attack + "," + Num(s.epsilon) + "," + Num(s.rho) + "," +
         std::to_string(s.trials) + "," + Num(s.mean_true) + "," + Num(s.mean_honest) + "," +
         Num(s.std_honest) + "," + Num(s.mean_poisoned) + "," + Num(s.std_poisoned) + "," +
         Num(s.mean_efficiency) + "," + Num(s.std_efficiency) + "," + OptNum(s.detection_rate) +
         "," + OptNum(s.honest_detection_rate);
}

void WriteOutputs(const std::string& dir, const std::vector<TrialResult>& trials,
                  const std::vector<Summary>& summaries) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  const fs::path root(dir);

  std::ofstream results(root / "results.jsonl");
  std::ofstream summary(root / "summary.csv");
  std::ofstream timings(root / "timings.csv");
  if (!results || !summary || !timings) {
    throw std::runtime_error("cannot write result files under '" + dir + "'");
  }
  for (const TrialResult& t : trials) results << TrialToJson(t).dump() << '\n';
  summary << SummaryCsvHeader() << '\n';
  for (const Summary& s : summaries) summary << SummaryCsvRow(s) << '\n';
  timings << "seed,query_id,honest_seconds,poisoned_seconds\n";
  for (const TrialResult& t : trials) {
    timings << t.seed << ',' << t.query_id << ',' << Num(t.honest_seconds) << ','
            << Num(t.poisoned_seconds) << '\n';
  }
  if (!results || !summary || !timings) throw std::runtime_error("error writing result files");
}

}  // namespace ldprq
