// Copyright 2026 The Funnel Authors
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

#ifndef FUNNEL_DATASET_HPP_
#define FUNNEL_DATASET_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "funnel/joint_distribution.hpp"

namespace funnel {

// Where to find the secret and data columns in a categorical CSV file.
struct DatasetSchema {
  std::string path;
  std::string secret_column;
  std::vector<std::string> data_columns;  // X^1..X^m, in attribute order
  char delimiter = ',';
  std::string missing_token = "?";
  // Add-lambda smoothing of the co-occurrence counts. Zero (the default)
  // keeps raw empirical frequencies; positive values lift zero-mass product
  // cells that would otherwise fail the positive-marginal requirement.
  double smoothing = 0.0;
};

// Per-column mapping between category labels and integer codes, ordered by
// first occurrence in the file.
struct CategoryCodebook {
  std::vector<std::string> column_names;            // secret first
  std::vector<std::vector<std::string>> labels;     // parallel to column_names

  int code_of(std::size_t column, const std::string& label) const;
};

struct IngestResult {
  JointDistribution joint;
  CategoryCodebook codebook;
  std::size_t total_rows = 0;
  std::size_t used_rows = 0;
  std::size_t dropped_rows = 0;  // missing values or malformed lines
};

// Builds an empirical prior from a header-carrying CSV. Rows with a missing
// value in any used column are dropped and counted. Throws SchemaMismatch
// when a named column is absent and EmptyAfterFiltering when no usable rows
// remain.
IngestResult ingest(const DatasetSchema& schema);
IngestResult ingest_stream(std::istream& in, const DatasetSchema& schema);

// One CSV record with quoted-field support ("" escapes a quote).
std::vector<std::string> parse_csv_record(const std::string& line,
                                          char delimiter);

}  // namespace funnel

#endif  // FUNNEL_DATASET_HPP_
