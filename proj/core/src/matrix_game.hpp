#pragma once

#include <cstddef>
#include <vector>

namespace mfbai::detail {

/// Zero-sum game where the row player picks a mixed strategy omega over `rows` and
/// the column player picks a column; payoff to the row player is sum_e omega_e C(e, j).
/// Columns are appended one at a time.
class MatrixGame {
 public:
  explicit MatrixGame(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return columns_.size(); }
  void add_column(std::vector<double> column) { columns_.push_back(std::move(column)); }

  struct Solution {
    std::vector<double> row_strategy;
    double value = 0.0;
    bool ok = false;
  };

  /// max_omega min_j <omega, C_j> by the dense simplex method.
  Solution solve() const;

 private:
  std::size_t rows_;
  std::vector<std::vector<double>> columns_;
};

}  // namespace mfbai::detail
