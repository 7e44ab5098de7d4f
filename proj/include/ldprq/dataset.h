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

#ifndef LDPRQ_DATASET_H_
#define LDPRQ_DATASET_H_

#include <string>
#include <vector>

#include "ldprq/random.h"
#include "ldprq/types.h"

namespace ldprq {

enum class Distribution { kGaussian, kLaplace, kUniform };

// Throws ConfigError for unknown names.
Distribution ParseDistribution(const std::string& name);
std::string DistributionName(Distribution d);

struct SyntheticSpec {
  Distribution kind = Distribution::kGaussian;
  double mean = 512.0;
  double stddev = 40.0;  // Laplace scale is stddev / sqrt(2)
};

// i.i.d. draws per attribute, rounded and clipped into [0, domain).
std::vector<Record> GenSynthetic(const SyntheticSpec& spec, std::size_t count, int dims, int domain,
                                 Rng& rng);

struct CsvLoadResult {
  std::vector<Record> records;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

// Reads a headered CSV, keeps `columns` (by header name), drops rows with
// missing or non-numeric values, then min-max rescales each column to
// [0, domain) and floors. Throws ConfigError on a missing file or column,
// or when every row is dropped.
CsvLoadResult LoadCsv(const std::string& path, const std::vector<std::string>& columns, int domain);

// Coordinate `attr` of every record.
std::vector<int> Column(const std::vector<Record>& records, int attr);

}  // namespace ldprq

#endif  // LDPRQ_DATASET_H_
