// Copyright 2026 The bayespc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayespc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace bayespc {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

WeightedDataset::WeightedDataset(std::vector<std::uint8_t> cells, std::vector<int> variable_ids,
                                 std::vector<double> weights)
    : cells_(std::move(cells)), variable_ids_(std::move(variable_ids)), weights_(std::move(weights)) {
  if (cells_.size() != weights_.size() * variable_ids_.size()) {
    throw std::invalid_argument("WeightedDataset: cell count does not match rows x columns");
  }
  for (std::size_t c = 1; c < variable_ids_.size(); ++c) {
    if (variable_ids_[c - 1] >= variable_ids_[c]) {
      throw std::invalid_argument("WeightedDataset: variable ids must be distinct and ascending");
    }
  }
  if (!variable_ids_.empty() && variable_ids_.front() < 0) {
    throw std::invalid_argument("WeightedDataset: variable ids must be nonnegative");
  }
  for (std::uint8_t v : cells_) {
    if (v > 1) throw std::invalid_argument("WeightedDataset: cells must be 0 or 1");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("WeightedDataset: weights must be finite and nonnegative");
    }
    total_weight_ += w;
  }
  if (!std::isfinite(total_weight_)) {
    throw std::invalid_argument("WeightedDataset: total weight overflows");
  }
}

WeightedDataset WeightedDataset::from_rows(const std::vector<std::vector<std::uint8_t>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<std::uint8_t> cells;
  cells.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("from_rows: ragged rows");
    cells.insert(cells.end(), r.begin(), r.end());
  }
  std::vector<int> ids(cols);
  for (std::size_t c = 0; c < cols; ++c) ids[c] = static_cast<int>(c);
  return WeightedDataset(std::move(cells), std::move(ids), std::vector<double>(rows.size(), 1.0));
}

std::optional<std::size_t> WeightedDataset::find_column(int var) const {
  auto it = std::lower_bound(variable_ids_.begin(), variable_ids_.end(), var);
  if (it == variable_ids_.end() || *it != var) return std::nullopt;
  return static_cast<std::size_t>(it - variable_ids_.begin());
}

std::size_t WeightedDataset::column_of(int var) const {
  auto col = find_column(var);
  if (!col) throw std::out_of_range("variable " + std::to_string(var) + " is not in the dataset");
  return *col;
}

WeightedDataset WeightedDataset::restrict(int var, int value) const {
  const std::size_t col = column_of(var);
  if (value != 0 && value != 1) throw std::invalid_argument("restrict: value must be 0 or 1");
  const std::size_t d = cols();
  std::vector<int> ids;
  ids.reserve(d - 1);
  for (std::size_t c = 0; c < d; ++c) {
    if (c != col) ids.push_back(variable_ids_[c]);
  }
  std::vector<std::uint8_t> cells;
  std::vector<double> weights;
  for (std::size_t r = 0; r < rows(); ++r) {
    const std::uint8_t* src = cells_.data() + r * d;
    if (src[col] != value) continue;
    cells.insert(cells.end(), src, src + col);
    cells.insert(cells.end(), src + col + 1, src + d);
    weights.push_back(weights_[r]);
  }
  return WeightedDataset(std::move(cells), std::move(ids), std::move(weights));
}

WeightedDataset WeightedDataset::with_weights(std::vector<double> weights) const {
  if (weights.size() != rows()) throw std::invalid_argument("with_weights: length mismatch");
  return WeightedDataset(cells_, variable_ids_, std::move(weights));
}

WeightedDataset WeightedDataset::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::uint8_t> cells;
  cells.reserve(indices.size() * cols());
  std::vector<double> weights;
  weights.reserve(indices.size());
  for (std::size_t r : indices) {
    if (r >= rows()) throw std::out_of_range("select_rows: row index out of range");
    auto src = row(r);
    cells.insert(cells.end(), src.begin(), src.end());
    weights.push_back(weights_[r]);
  }
  return WeightedDataset(std::move(cells), variable_ids_, std::move(weights));
}

std::vector<std::uint8_t> WeightedDataset::assignment(std::size_t r) const {
  std::vector<std::uint8_t> x(id_bound(), 0);
  auto src = row(r);
  for (std::size_t c = 0; c < cols(); ++c) x[variable_ids_[c]] = src[c];
  return x;
}

WeightedDataset concatenate(const WeightedDataset& a, const WeightedDataset& b) {
  if (!std::equal(a.variable_ids().begin(), a.variable_ids().end(), b.variable_ids().begin(),
                  b.variable_ids().end())) {
    throw std::invalid_argument("concatenate: datasets have different variables");
  }
  std::vector<std::uint8_t> cells;
  std::vector<double> weights;
  for (const WeightedDataset* d : {&a, &b}) {
    for (std::size_t r = 0; r < d->rows(); ++r) {
      cells.insert(cells.end(), d->row(r).begin(), d->row(r).end());
      weights.push_back(d->weight(r));
    }
  }
  return WeightedDataset(std::move(cells), {a.variable_ids().begin(), a.variable_ids().end()},
                         std::move(weights));
}

WeightedDataset parse_csv(std::istream& in, const std::string& source) {
  std::vector<std::uint8_t> cells;
  std::size_t arity = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // A blank final line is just the trailing newline of the previous one.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw ParseError(source, line_no, "empty line");
    }
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      const std::string_view token(line.data() + pos, end - pos);
      if (token == "0") {
        cells.push_back(0);
      } else if (token == "1") {
        cells.push_back(1);
      } else {
        throw ParseError(source, line_no,
                         "expected 0 or 1 in column " + std::to_string(count + 1) + ", got '" +
                             std::string(token) + "'");
      }
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      arity = count;
    } else if (count != arity) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(arity) + " values, got " + std::to_string(count));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(source, line_no == 0 ? 1 : line_no, "no data rows");
  std::vector<int> ids(arity);
  for (std::size_t c = 0; c < arity; ++c) ids[c] = static_cast<int>(c);
  return WeightedDataset(std::move(cells), std::move(ids), std::vector<double>(rows, 1.0));
}

WeightedDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

void write_csv(std::ostream& out, const WeightedDataset& d) {
  std::string line;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    line.clear();
    auto src = d.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) {
      if (c) line.push_back(',');
      line.push_back(static_cast<char>('0' + src[c]));
    }
    line.push_back('\n');
    out << line;
  }
}

std::array<double, 2> value_counts(const WeightedDataset& d, int var) {
  const std::size_t col = d.column_of(var);
  std::array<double, 2> n{0.0, 0.0};
  for (std::size_t r = 0; r < d.rows(); ++r) n[d.at(r, col)] += d.weight(r);
  return n;
}

PairTable pair_counts(const WeightedDataset& d, int i, int j) {
  if (i == j) throw std::invalid_argument("pair_counts: variables must differ");
  const std::size_t ci = d.column_of(i);
  const std::size_t cj = d.column_of(j);
  PairTable t{};
  for (std::size_t r = 0; r < d.rows(); ++r) t[d.at(r, ci)][d.at(r, cj)] += d.weight(r);
  return t;
}

}  // namespace bayespc
