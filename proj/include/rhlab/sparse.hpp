#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rhlab {

struct Triplet {
  std::int32_t row;
  std::int32_t col;
  double value;
};

/// Row-compressed sparse matrix with sorted column indices per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> col,
            std::vector<double> val);

  /// Duplicate entries are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return val_.size(); }
  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const std::int32_t> col() const { return col_; }
  std::span<const double> val() const { return val_; }

  /// y = A x, parallel over rows.
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;
  CsrMatrix transpose() const;
  double max_abs() const;
  /// max |A - A^T| over stored and mirrored entries.
  double max_asymmetry() const;
  /// Off-diagonal entries are all <= 0.
  bool is_z_matrix() const;
  /// min over rows of a_ii - sum_{j != i} |a_ij|.
  double gershgorin_lower_bound() const;

  /// Matrix Market coordinate format, 1-based indices.
  void write_matrix_market(std::ostream& out) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> col_;
  std::vector<double> val_;
};

}  // namespace rhlab
