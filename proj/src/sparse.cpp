#include "rhlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rhlab/parallel.hpp"

namespace rhlab {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::int64_t> row_ptr,
                     std::vector<std::int32_t> col, std::vector<double> val)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_(std::move(col)), val_(std::move(val)) {
  if (row_ptr_.size() != rows_ + 1 || col_.size() != val_.size() ||
      static_cast<std::size_t>(row_ptr_.back()) != val_.size()) {
    throw std::invalid_argument("inconsistent CSR arrays");
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  std::vector<std::int64_t> row_ptr(rows + 1, 0);
  std::vector<std::int32_t> col;
  std::vector<double> val;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && t.row == triplets[k - 1].row && t.col == triplets[k - 1].col) {
      val.back() += t.value;
      continue;
    }
    col.push_back(t.col);
    val.push_back(t.value);
    ++row_ptr[static_cast<std::size_t>(t.row) + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col), std::move(val));
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  parallel::for_blocks(rows_, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
      y[i] = s;
    }
  });
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = col_.begin() + row_ptr_[i];
  const auto last = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  return it != last && *it == static_cast<std::int32_t>(j) ? val_[it - col_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) d[i] = at(i, i);
  return d;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::int64_t> row_ptr(cols_ + 1, 0);
  for (auto c : col_) ++row_ptr[static_cast<std::size_t>(c) + 1];
  for (std::size_t i = 0; i < cols_; ++i) row_ptr[i + 1] += row_ptr[i];
  std::vector<std::int64_t> next(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<std::int32_t> col(val_.size());
  std::vector<double> val(val_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto pos = next[static_cast<std::size_t>(col_[k])]++;
      col[pos] = static_cast<std::int32_t>(i);
      val[pos] = val_[k];
    }
  }
  return CsrMatrix(cols_, rows_, std::move(row_ptr), std::move(col), std::move(val));
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::max_asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m = std::max(m, std::abs(val_[k] - at(static_cast<std::size_t>(col_[k]), i)));
    }
  }
  return m;
}

bool CsrMatrix::is_z_matrix() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (static_cast<std::size_t>(col_[k]) != i && val_[k] > 0.0) return false;
    }
  }
  return true;
}

double CsrMatrix::gershgorin_lower_bound() const {
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows_; ++i) {
    double diag = 0.0;
    double off = 0.0;
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (static_cast<std::size_t>(col_[k]) == i) {
        diag += val_[k];
      } else {
        off += std::abs(val_[k]);
      }
    }
    bound = std::min(bound, diag - off);
  }
  return bound;
}

void CsrMatrix::write_matrix_market(std::ostream& out) const {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << rows_ << ' ' << cols_ << ' ' << val_.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < rows_; ++i) {
    for (auto k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", val_[k]);
      out << i + 1 << ' ' << col_[k] + 1 << ' ' << buf << '\n';
    }
  }
}

}  // namespace rhlab
