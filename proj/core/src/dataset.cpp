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

#include "funnel/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

namespace funnel {

int CategoryCodebook::code_of(std::size_t column, const std::string& label) const {
  const auto& col = labels.at(column);
  const auto it = std::find(col.begin(), col.end(), label);
  if (it == col.end()) return -1;
  return static_cast<int>(it - col.begin());
}

std::vector<std::string> parse_csv_record(const std::string& line,
                                          char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

IngestResult ingest_stream(std::istream& in, const DatasetSchema& schema) {
  if (schema.data_columns.empty()) {
    throw SchemaMismatch("at least one data column is required");
  }
  for (const auto& col : schema.data_columns) {
    if (col == schema.secret_column) {
      throw SchemaMismatch("secret column may not double as a data column");
    }
  }

  std::string header;
  if (!std::getline(in, header)) {
    throw SchemaMismatch("input has no header row");
  }
  const std::vector<std::string> names = parse_csv_record(header, schema.delimiter);
  auto column_index = [&](const std::string& wanted) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (trimmed(names[i]) == wanted) return static_cast<int>(i);
    }
    throw SchemaMismatch("column '" + wanted + "' not found in header");
  };

  const int secret_idx = column_index(schema.secret_column);
  std::vector<int> data_idx;
  for (const auto& col : schema.data_columns) data_idx.push_back(column_index(col));

  const std::size_t m = schema.data_columns.size();
  CategoryCodebook codebook;
  codebook.column_names.push_back(schema.secret_column);
  for (const auto& col : schema.data_columns) codebook.column_names.push_back(col);
  codebook.labels.resize(m + 1);
  std::vector<std::map<std::string, int>> codes(m + 1);

  auto code_for = [&](std::size_t column, const std::string& label) {
    auto [it, fresh] = codes[column].try_emplace(
        label, static_cast<int>(codebook.labels[column].size()));
    if (fresh) codebook.labels[column].push_back(label);
    return it->second;
  };

  struct Row {
    int s;
    std::vector<int> xs;
  };
  std::vector<Row> rows;
  IngestResult result{JointDistribution(Eigen::MatrixXd::Ones(1, 1)),
                      CategoryCodebook{}, 0, 0, 0};

  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++result.total_rows;
    const std::vector<std::string> fields = parse_csv_record(line, schema.delimiter);
    const int max_idx = std::max(
        secret_idx, *std::max_element(data_idx.begin(), data_idx.end()));
    if (static_cast<int>(fields.size()) <= max_idx) {
      ++result.dropped_rows;
      continue;
    }
    Row row;
    bool missing = false;
    const std::string secret = trimmed(fields[secret_idx]);
    if (secret == schema.missing_token || secret.empty()) missing = true;
    std::vector<std::string> values;
    for (int idx : data_idx) {
      std::string v = trimmed(fields[idx]);
      if (v == schema.missing_token || v.empty()) {
        missing = true;
        break;
      }
      values.push_back(std::move(v));
    }
    if (missing) {
      ++result.dropped_rows;
      continue;
    }
    row.s = code_for(0, secret);
    for (std::size_t k = 0; k < m; ++k) row.xs.push_back(code_for(k + 1, values[k]));
    rows.push_back(std::move(row));
    ++result.used_rows;
  }

  if (rows.empty()) {
    throw EmptyAfterFiltering("no usable rows after dropping missing values");
  }

  const int c = static_cast<int>(codebook.labels[0].size());
  std::vector<int> shape;
  long long a = 1;
  for (std::size_t k = 0; k < m; ++k) {
    shape.push_back(static_cast<int>(codebook.labels[k + 1].size()));
    a *= shape.back();
  }

  std::vector<int> stride(m, 1);
  for (int k = static_cast<int>(m) - 2; k >= 0; --k) {
    stride[k] = stride[k + 1] * shape[k + 1];
  }

  Eigen::MatrixXd counts = Eigen::MatrixXd::Constant(
      c, a, schema.smoothing);
  for (const Row& row : rows) {
    int x = 0;
    for (std::size_t k = 0; k < m; ++k) x += row.xs[k] * stride[k];
    counts(row.s, x) += 1.0;
  }
  counts /= counts.sum();

  result.codebook = std::move(codebook);
  result.joint = JointDistribution(std::move(counts), shape);
  return result;
}

IngestResult ingest(const DatasetSchema& schema) {
  std::ifstream in(schema.path);
  if (!in) throw IoError("cannot open dataset file: " + schema.path);
  return ingest_stream(in, schema);
}

}  // namespace funnel
