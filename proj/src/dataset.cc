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

#include "ldprq/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ldprq {

Distribution ParseDistribution(const std::string& name) {
  if (name == "gaussian") return Distribution::kGaussian;
  if (name == "laplace") return Distribution::kLaplace;
  if (name == "uniform") return Distribution::kUniform;
  throw ConfigError("unknown distribution '" + name + "' (expected gaussian|laplace|uniform)");
}

std::string DistributionName(Distribution d) {
  switch (d) {
    case Distribution::kGaussian:
      return "gaussian";
    case Distribution::kLaplace:
      return "laplace";
    case Distribution::kUniform:
      return "uniform";
  }
  return "unknown";
}

std::vector<Record> GenSynthetic(const SyntheticSpec& spec, std::size_t count, int dims, int domain,
                                 Rng& rng) {
  if (dims < 1 || domain < 1) throw ConfigError("need positive dimensions and domain");
  if (!(spec.stddev >= 0.0)) throw ConfigError("standard deviation must be non-negative");
  std::vector<Record> out(count, Record(dims, 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<int> uniform(0, domain - 1);
  const double laplace_scale = spec.stddev / std::sqrt(2.0);
  for (Record& r : out) {
    for (int a = 0; a < dims; ++a) {
      double x = spec.mean;
      switch (spec.kind) {
        case Distribution::kGaussian:
          x += spec.stddev * normal(rng);
          break;
        case Distribution::kLaplace:
          // Difference of two exponentials.
          x += laplace_scale * (expo(rng) - expo(rng));
          break;
        case Distribution::kUniform:
          r[a] = uniform(rng);
          continue;
      }
      const double v = std::clamp(std::round(x), 0.0, static_cast<double>(domain - 1));
      r[a] = static_cast<int>(v);
    }
  }
  return out;
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(field);
  return fields;
}

bool ParseNumber(std::string s, double& out) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return false;
  const auto last = s.find_last_not_of(" \t");
  s = s.substr(first, last - first + 1);
  const char* begin = s.data();
  const char* end = begin + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

CsvLoadResult LoadCsv(const std::string& path, const std::vector<std::string>& columns, int domain) {
  if (domain < 1) throw ConfigError("domain must be positive");
  if (columns.empty()) throw ConfigError("select at least one CSV column");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV file '" + path + "' is empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  std::vector<std::size_t> index;
  for (const std::string& c : columns) {
    const auto it = std::find(header.begin(), header.end(), c);
    if (it == header.end()) throw ConfigError("CSV has no column '" + c + "'");
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  CsvLoadResult result;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++result.rows_read;
    const std::vector<std::string> fields = SplitCsvLine(line);
    std::vector<double> row(index.size());
    bool ok = true;
    for (std::size_t k = 0; k < index.size() && ok; ++k) {
      ok = index[k] < fields.size() && ParseNumber(fields[index[k]], row[k]);
    }
    if (ok) {
      rows.push_back(std::move(row));
    } else {
      ++result.rows_dropped;
    }
  }
  if (rows.empty()) throw ConfigError("no well-formed rows in '" + path + "'");

  const std::size_t dims = index.size();
  std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < dims; ++k) {
      lo[k] = std::min(lo[k], row[k]);
      hi[k] = std::max(hi[k], row[k]);
    }
  }
  result.records.reserve(rows.size());
  for (const auto& row : rows) {
    Record r(dims, 0);
    for (std::size_t k = 0; k < dims; ++k) {
      const double range = hi[k] - lo[k];
      if (range <= 0.0) continue;
      const double scaled = std::floor((row[k] - lo[k]) / range * domain);
      r[k] = static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(domain - 1)));
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

std::vector<int> Column(const std::vector<Record>& records, int attr) {
  std::vector<int> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(r.at(attr));
  return out;
}

}  // namespace ldprq
