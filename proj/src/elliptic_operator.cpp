#include "rhlab/elliptic_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

Matrix identity_matrix() {
  Matrix a{};
  for (int d = 0; d < 3; ++d) a[d][d] = 1.0;
  return a;
}

bool has_off_diagonal(const Matrix& a) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j && a[i][j] != 0.0) return true;
    }
  }
  return false;
}

template <int N>
double smallest_symmetric_eigenvalue(const Matrix& a) {
  Eigen::Matrix<double, N, N> s;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) s(i, j) = 0.5 * (a[i][j] + a[j][i]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, N, N>> solver(s, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double smallest_eigenvalue(const Matrix& a, int dim) {
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (!std::isfinite(a[i][j])) throw ConfigError("non-finite coefficient sample");
    }
  }
  return dim == 2 ? smallest_symmetric_eigenvalue<2>(a) : smallest_symmetric_eigenvalue<3>(a);
}

Matrix sample(const CoefficientField& coeff, const Point& x, int dim) {
  Matrix a = coeff(x);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (!std::isfinite(a[i][j])) throw ConfigError("non-finite coefficient sample");
    }
  }
  return a;
}

int slot(const std::array<int, 3>& offset, int dim) {
  int s = 0;
  for (int d = dim - 1; d >= 0; --d) s = s * 3 + (offset[d] + 1);
  return s;
}

}  // namespace

CoefficientField CoefficientField::identity() {
  CoefficientField c;
  c.value = [](const Point&) { return identity_matrix(); };
  c.symmetric = true;
  c.constant = true;
  c.diagonal = true;
  c.description = "identity";
  return c;
}

CoefficientField CoefficientField::diagonal_matrix(const Point& entries) {
  Matrix a{};
  for (int d = 0; d < 3; ++d) a[d][d] = entries[d];
  CoefficientField c = constant_matrix(a);
  c.description = "diagonal";
  return c;
}

CoefficientField CoefficientField::constant_matrix(const Matrix& a) {
  CoefficientField c;
  c.value = [a](const Point&) { return a; };
  c.constant = true;
  c.diagonal = !has_off_diagonal(a);
  c.symmetric = true;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) c.symmetric = c.symmetric && a[i][j] == a[j][i];
  }
  c.description = "constant";
  return c;
}

CoefficientField CoefficientField::shear(double amplitude) {
  CoefficientField c;
  c.value = [amplitude](const Point& x) {
    Matrix a = identity_matrix();
    const double s = amplitude * std::sin(std::numbers::pi * x[0]);
    a[0][1] = s;
    a[1][0] = s;
    return a;
  };
  c.symmetric = true;
  c.diagonal = amplitude == 0.0;
  c.description = "shear";
  return c;
}

CoefficientField CoefficientField::rotation(double amplitude) {
  CoefficientField c;
  c.value = [amplitude](const Point& x) {
    Matrix a = identity_matrix();
    const double s = amplitude * std::sin(std::numbers::pi * x[1]);
    a[0][1] = s;
    a[1][0] = -s;
    return a;
  };
  c.symmetric = amplitude == 0.0;
  c.diagonal = amplitude == 0.0;
  c.description = "rotation";
  return c;
}

CoefficientField symmetric_part(const CoefficientField& coeff) {
  CoefficientField c = coeff;
  auto base = coeff.value;
  c.value = [base](const Point& x) {
    const Matrix a = base(x);
    Matrix s{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) s[i][j] = 0.5 * (a[i][j] + a[j][i]);
    }
    return s;
  };
  c.symmetric = true;
  c.description = "sym(" + coeff.description + ")";
  return c;
}

SparseOperator::SparseOperator(CsrMatrix matrix, DomainRef mask, bool symmetric, double ellipticity)
    : matrix_(std::move(matrix)), mask_(std::move(mask)), symmetric_(symmetric), ellipticity_(ellipticity) {}

ScalarField SparseOperator::apply(const ScalarField& u) const {
  ScalarField out(u.size(), 0.0);
  matrix_.multiply(u.values(), out.values());
  return out;
}

double SparseOperator::quadratic_form(const ScalarField& v) const {
  const ScalarField av = apply(v);
  return parallel::dot(v.values(), av.values());
}

SparseOperator assemble(const DomainRef& mask_ref, const CoefficientField& coeff, const ScalarField& potential) {
  const DomainMask& mask = *mask_ref;
  check_field(potential, mask);
  check_finite(potential, "potential");
  const Grid& grid = mask.grid();
  const int dim = grid.dim;
  const std::size_t rows = mask.interior_count();
  const Matrix constant_a = coeff.constant ? sample(coeff, Point{}, dim) : Matrix{};
  auto coefficient = [&](const Point& x) { return coeff.constant ? constant_a : sample(coeff, x, dim); };

  struct Block {
    std::vector<std::int32_t> nnz;
    std::vector<std::int32_t> col;
    std::vector<double> val;
  };
  std::vector<Block> blocks(parallel::block_count(rows));

  parallel::for_blocks(rows, [&](std::size_t begin, std::size_t end) {
    Block& out = blocks[begin / parallel::kBlockSize];
    std::array<double, 27> value{};
    std::array<bool, 27> touched{};
    std::array<std::int32_t, 27> column{};
    for (std::size_t row = begin; row < end; ++row) {
      value.fill(0.0);
      touched.fill(false);
      const NodeIndex idx = grid.multi_index(mask.node_of(row));
      const Point x = grid.coordinate(idx);
      auto add = [&](const std::array<int, 3>& offset, double v) {
        NodeIndex nb = idx;
        for (int d = 0; d < dim; ++d) nb[d] += offset[d];
        const auto k = mask.interior_index(grid.linear_index(nb));
        if (k < 0) return;
        const int s = slot(offset, dim);
        value[s] += v;
        touched[s] = true;
        column[s] = k;
      };

      for (int d = 0; d < dim; ++d) {
        const double inv_h2 = 1.0 / (grid.spacing[d] * grid.spacing[d]);
        for (int side : {-1, 1}) {
          Point face = x;
          face[d] += 0.5 * side * grid.spacing[d];
          const double c = coefficient(face)[d][d] * inv_h2;
          std::array<int, 3> offset{0, 0, 0};
          add(offset, c);
          offset[d] = side;
          add(offset, -c);
        }
      }

      if (!coeff.diagonal) {
        for (int p = 0; p < dim; ++p) {
          for (int q = p + 1; q < dim; ++q) {
            const double hp = grid.spacing[p];
            const double hq = grid.spacing[q];
            // The four plane cells that have this node as corner (cp, cq).
            for (int cp = 0; cp < 2; ++cp) {
              for (int cq = 0; cq < 2; ++cq) {
                Point center = x;
                center[p] += (0.5 - cp) * hp;
                center[q] += (0.5 - cq) * hq;
                const Matrix a = coefficient(center);
                const double apq = a[p][q];
                const double aqp = a[q][p];
                if (apq == 0.0 && aqp == 0.0) continue;
                const double dp_row = (cp ? 1.0 : -1.0) / (2.0 * hp);
                const double dq_row = (cq ? 1.0 : -1.0) / (2.0 * hq);
                for (int kp = 0; kp < 2; ++kp) {
                  for (int kq = 0; kq < 2; ++kq) {
                    const double dp_col = (kp ? 1.0 : -1.0) / (2.0 * hp);
                    const double dq_col = (kq ? 1.0 : -1.0) / (2.0 * hq);
                    std::array<int, 3> offset{0, 0, 0};
                    offset[p] = kp - cp;
                    offset[q] = kq - cq;
                    add(offset, apq * dq_row * dp_col + aqp * dp_row * dq_col);
                  }
                }
              }
            }
          }
        }
      }

      const int center_slot = slot({0, 0, 0}, dim);
      value[center_slot] += potential[row];
      touched[center_slot] = true;
      column[center_slot] = static_cast<std::int32_t>(row);

      std::int32_t count = 0;
      std::array<std::pair<std::int32_t, double>, 27> entries{};
      for (int s = 0; s < 27; ++s) {
        if (touched[s]) entries[count++] = {column[s], value[s]};
      }
      std::sort(entries.begin(), entries.begin() + count);
      out.nnz.push_back(count);
      for (int e = 0; e < count; ++e) {
        out.col.push_back(entries[e].first);
        out.val.push_back(entries[e].second);
      }
    }
  });

  std::vector<std::int64_t> row_ptr(rows + 1, 0);
  std::size_t row = 0;
  for (const auto& b : blocks) {
    for (auto c : b.nnz) {
      row_ptr[row + 1] = row_ptr[row] + c;
      ++row;
    }
  }
  std::vector<std::int32_t> col;
  std::vector<double> val;
  col.reserve(static_cast<std::size_t>(row_ptr.back()));
  val.reserve(static_cast<std::size_t>(row_ptr.back()));
  for (auto& b : blocks) {
    col.insert(col.end(), b.col.begin(), b.col.end());
    val.insert(val.end(), b.val.begin(), b.val.end());
    b = Block{};
  }
  CsrMatrix matrix(rows, rows, std::move(row_ptr), std::move(col), std::move(val));
  const double lambda = ellipticity_constant(coeff, mask);
  return SparseOperator(std::move(matrix), mask_ref, coeff.symmetric, lambda);
}

double ellipticity_constant(const CoefficientField& coeff, const DomainMask& mask) {
  const Grid& grid = mask.grid();
  const int dim = grid.dim;
  double lambda = 0.0;
  if (coeff.constant) {
    lambda = smallest_eigenvalue(coeff(Point{}), dim);
  } else {
    const std::size_t count = mask.interior_count();
    std::vector<double> partial(parallel::block_count(count), std::numeric_limits<double>::infinity());
    parallel::for_blocks(count, [&](std::size_t begin, std::size_t end) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = begin; i < end; ++i) {
        const Point x = mask.coordinate(i);
        m = std::min(m, smallest_eigenvalue(coeff(x), dim));
        for (int d = 0; d < dim; ++d) {
          for (int side : {-1, 1}) {
            Point face = x;
            face[d] += 0.5 * side * grid.spacing[d];
            m = std::min(m, smallest_eigenvalue(coeff(face), dim));
          }
        }
        if (coeff.diagonal) continue;
        for (int p = 0; p < dim; ++p) {
          for (int q = p + 1; q < dim; ++q) {
            for (int sp : {-1, 1}) {
              for (int sq : {-1, 1}) {
                Point c = x;
                c[p] += 0.5 * sp * grid.spacing[p];
                c[q] += 0.5 * sq * grid.spacing[q];
                m = std::min(m, smallest_eigenvalue(coeff(c), dim));
              }
            }
          }
        }
      }
      partial[begin / parallel::kBlockSize] = m;
    });
    lambda = *std::min_element(partial.begin(), partial.end());
  }
  if (!(lambda > 0.0)) throw HypothesisError("coefficient matrix is not uniformly elliptic (Lambda <= 0)");
  return lambda;
}

double weak_residual(const SparseOperator& op, double lambda, const ScalarField& u) {
  check_field(u, op.mask());
  const double norm_u = parallel::norm2(u.values());
  if (norm_u == 0.0) throw DegenerateInputError("weak residual of the zero field");
  ScalarField r = op.apply(u);
  parallel::axpy(-lambda, u.values(), r.values());
  return parallel::norm2(r.values()) / norm_u;
}

}  // namespace rhlab
