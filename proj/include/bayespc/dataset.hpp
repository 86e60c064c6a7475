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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bayespc {

/// Raised for malformed CSV input; carries the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Raised when a file cannot be opened or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weighted counts of a pair of binary variables: table[a][b].
using PairTable = std::array<std::array<double, 2>, 2>;

/// Binary sample matrix with one nonnegative weight per row.
///
/// Columns are labelled by global variable ids (distinct, ascending), so a
/// dataset restricted on some variables still knows which variables its
/// columns are. Zero-weight rows are kept; every counting routine is a weight
/// sum, so they contribute nothing. Immutable once built.
class WeightedDataset {
 public:
  WeightedDataset() = default;

  /// `cells` is row-major with `variable_ids.size()` columns.
  WeightedDataset(std::vector<std::uint8_t> cells, std::vector<int> variable_ids,
                  std::vector<double> weights);

  /// Unit-weight dataset over variables 0..cols-1.
  static WeightedDataset from_rows(const std::vector<std::vector<std::uint8_t>>& rows);

  std::size_t rows() const { return weights_.size(); }
  std::size_t cols() const { return variable_ids_.size(); }
  bool empty() const { return weights_.empty(); }

  std::uint8_t at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {cells_.data() + r * cols(), cols()};
  }
  double weight(std::size_t r) const { return weights_[r]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const int> variable_ids() const { return variable_ids_; }
  double total_weight() const { return total_weight_; }

  /// Largest variable id + 1; the length of a global assignment vector.
  std::size_t id_bound() const {
    return variable_ids_.empty() ? 0 : static_cast<std::size_t>(variable_ids_.back()) + 1;
  }

  /// Column position of a global variable id, if present.
  std::optional<std::size_t> find_column(int var) const;
  /// Column position of a global variable id; throws std::out_of_range if absent.
  std::size_t column_of(int var) const;

  /// Rows with `var == value`, with the column of `var` removed.
  WeightedDataset restrict(int var, int value) const;

  /// Same samples, new weights.
  WeightedDataset with_weights(std::vector<double> weights) const;

  /// The listed rows, in the given order.
  WeightedDataset select_rows(std::span<const std::size_t> indices) const;

  /// Row `r` scattered into a vector indexed by global variable id.
  std::vector<std::uint8_t> assignment(std::size_t r) const;

 private:
  std::vector<std::uint8_t> cells_;
  std::vector<int> variable_ids_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
};

/// Rows of `a` followed by rows of `b`; both must share variable ids.
WeightedDataset concatenate(const WeightedDataset& a, const WeightedDataset& b);

/// Parses comma-separated 0/1 rows. `source` names the input in error messages.
WeightedDataset parse_csv(std::istream& in, const std::string& source = "<input>");

/// Reads a dataset file; throws IoError if it cannot be opened and ParseError
/// on malformed content.
WeightedDataset load_csv(const std::filesystem::path& path);

/// Writes rows as comma-separated 0/1 tokens, one newline-terminated line each.
void write_csv(std::ostream& out, const WeightedDataset& d);

/// Weighted counts of the values of one variable: {n(x=0), n(x=1)}.
std::array<double, 2> value_counts(const WeightedDataset& d, int var);

/// 2x2 weighted contingency table of variables i and j (global ids, i != j).
PairTable pair_counts(const WeightedDataset& d, int i, int j);

}  // namespace bayespc
