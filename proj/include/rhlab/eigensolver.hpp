#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rhlab/elliptic_operator.hpp"
#include "rhlab/field.hpp"

namespace rhlab {

struct SolverConfig {
  /// Bound on ||A u - lambda u|| / ||u|| for a converged pair.
  double tolerance = 1e-8;
  int max_iterations = 2000;
  /// Fixed shift. When absent the eigensolver starts below the Gershgorin
  /// bound and moves the shift towards the spectrum as the iterate converges;
  /// solve_linear uses zero.
  std::optional<double> shift;
  /// Relative residual target of solve_linear and floor of the inner solves.
  double linear_tolerance = 1e-10;
  int max_linear_iterations = 20000;
};

/// Throws ConfigError unless tolerances lie in (0, 1) and iteration caps are >= 1.
void validate(const SolverConfig& config);

struct EigenPair {
  double lambda = 0.0;
  /// Normalized so that sum u_i^2 h^n = 1, sign chosen so that sum u_i >= 0.
  ScalarField u;
  double residual = 0.0;
  int iterations = 0;
};

struct EigenResult {
  /// Converged pairs in increasing order of lambda.
  std::vector<EigenPair> pairs;
  bool converged = false;
  /// Reason for stopping early; empty when converged.
  std::string failure;
  /// Last shift used for the first pair.
  double shift = 0.0;
};

/// Solves (A - sigma I) x = rhs to relative residual config.linear_tolerance with
/// sigma = config.shift (zero when absent). Jacobi-preconditioned conjugate
/// gradients for symmetric operators, BiCGSTAB otherwise. Throws SolverError
/// carrying the final relative residual on breakdown or when the iteration cap
/// is hit.
ScalarField solve_linear(const SparseOperator& op, const ScalarField& rhs, const SolverConfig& config);

/// The k smallest eigenpairs by shift-invert power iteration.
///
/// The first pair starts from the all-ones vector; later pairs start from a
/// fixed-seed pseudo-random vector, deflated against the converged ones. On a
/// non-symmetric operator the iteration runs on orthonormal Schur vectors and
/// the eigenvectors are recovered from the triangular factor. A stable
/// complex pair of Ritz values raises UnsupportedSpectrumError; any other
/// failure returns the pairs found so far with converged = false.
EigenResult smallest_eigenpairs(const SparseOperator& op, int k, const SolverConfig& config);

double weak_residual(const SparseOperator& op, const EigenPair& pair);

}  // namespace rhlab
