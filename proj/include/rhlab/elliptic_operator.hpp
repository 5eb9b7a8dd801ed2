#pragma once

#include <array>
#include <functional>
#include <string>

#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"
#include "rhlab/sparse.hpp"

namespace rhlab {

using Matrix = std::array<std::array<double, 3>, 3>;

/// Coefficient matrix a(x) of L u = -d_j(a_ij d_i u) + V u. Only the leading
/// dim x dim block is used.
struct CoefficientField {
  std::function<Matrix(const Point&)> value;
  bool symmetric = true;
  bool constant = false;
  /// No off-diagonal entry anywhere; mixed-derivative stencils are skipped.
  bool diagonal = false;
  std::string description;

  Matrix operator()(const Point& x) const { return value(x); }

  static CoefficientField identity();
  static CoefficientField diagonal_matrix(const Point& entries);
  static CoefficientField constant_matrix(const Matrix& a);
  /// I + amplitude * sin(pi x_1) (e_1 e_2^T + e_2 e_1^T).
  static CoefficientField shear(double amplitude);
  /// I + amplitude * sin(pi x_2) (e_1 e_2^T - e_2 e_1^T); not symmetric.
  static CoefficientField rotation(double amplitude);
};

/// (a + a^T) / 2 pointwise.
CoefficientField symmetric_part(const CoefficientField& coeff);

/// Discrete L on the interior nodes of a mask.
class SparseOperator {
 public:
  SparseOperator(CsrMatrix matrix, DomainRef mask, bool symmetric, double ellipticity);

  const CsrMatrix& matrix() const { return matrix_; }
  const DomainMask& mask() const { return *mask_; }
  const DomainRef& mask_ref() const { return mask_; }
  bool symmetric() const { return symmetric_; }
  /// Cached ellipticity constant of the coefficient the operator was built from.
  double ellipticity() const { return ellipticity_; }
  std::size_t size() const { return matrix_.rows(); }

  void apply(std::span<const double> x, std::span<double> y) const { matrix_.multiply(x, y); }
  ScalarField apply(const ScalarField& u) const;
  /// v^T A v.
  double quadratic_form(const ScalarField& v) const;

 private:
  CsrMatrix matrix_;
  DomainRef mask_;
  bool symmetric_;
  double ellipticity_;
};

/// Flux-form assembly of -d_j(a_ij d_i u) + V u with Dirichlet nodes eliminated.
///
/// The matrix is sum_ij D_j^T diag(a_ij) D_i. Diagonal terms use the face
/// difference quotient with a_ii sampled at the face midpoint, which gives the
/// (2n+1)-point Laplacian for a = I. Mixed terms use four-point gradients at the
/// centers of the plane cells spanned by axes i and j, with a_ij sampled there.
/// The antisymmetric part of a therefore assembles to an antisymmetric matrix.
SparseOperator assemble(const DomainRef& mask, const CoefficientField& coeff, const ScalarField& potential);

/// Minimum over interior nodes, face midpoints and plane-cell centers of the
/// smallest eigenvalue of (a + a^T)/2. Throws HypothesisError if it is <= 0.
double ellipticity_constant(const CoefficientField& coeff, const DomainMask& mask);

/// ||A u - lambda u||_2 / ||u||_2, the defect of the discrete weak form over
/// the nodal test functions. Throws DegenerateInputError for u = 0.
double weak_residual(const SparseOperator& op, double lambda, const ScalarField& u);

}  // namespace rhlab
