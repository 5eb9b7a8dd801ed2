#pragma once

#include <string>
#include <vector>

#include "rhlab/eigensolver.hpp"
#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"

namespace rhlab {

/// Constants entering the reverse Hölder bound.
struct BoundConstants {
  int n = 3;
  double ellipticity = 1.0;
  double lambda = 0.0;
  double alpha = 1.0;
  double r = 2.0;
  double cn = 0.0;
  /// Morrey-Campanato norm of the potential.
  double mc = 0.0;
  double c_alpha = 1.0;
};

/// 1 + alpha^(alpha/(2-alpha)) (2 cn mc / ellipticity)^(2/(2-alpha)).
/// Throws HypothesisError unless 0 < alpha < 2 and ellipticity > 0.
double c_alpha(double alpha, double cn, double ellipticity, double mc);

/// Validates alpha in (0, 2), r > 2/alpha, ellipticity > 0, cn, mc >= 0 and
/// stores c_alpha computed from them.
BoundConstants make_bound_constants(int n, double ellipticity, double lambda, double alpha, double r, double cn,
                                    double mc);

/// C_alpha^(n/2p) max(p,2)^(n/(p(2-alpha))) omega^(n(n-2)/(p(2-alpha))), omega = n/(n-2).
/// Throws ConfigError for n < 3.
double growth_factor(int n, double p, double alpha, double c_alpha);

/// Same factor with the omega exponent n(n-2)/(2p(2-alpha)) obtained by summing
/// the ladder's geometric series.
double telescoped_growth_factor(int n, double p, double alpha, double c_alpha);

/// sum_{k=1..terms} 1 / (p omega^(k-1)); tends to n / (2p).
double exponent_partial_sum(int n, double p, int terms);

struct NormQuery {
  double p = 2.0;
  double q = 2.0;
};

struct RHIRow {
  /// "u", or "f" / "g" for the positive and negative parts.
  std::string part;
  double p = 0.0;
  double q = 0.0;
  double norm_p = 0.0;
  double norm_q = 0.0;
  double ratio = 0.0;
  double factor = 0.0;
  double telescoped_factor = 0.0;
  double fitted_c = 0.0;
  /// ratio <= factor, the bound with unit constant.
  bool satisfied = false;
  /// Empty for a valid row; otherwise why the row carries no numbers.
  std::string error;
};

struct RHIReport {
  std::vector<RHIRow> rows;
  /// Largest fitted_c over the valid rows of u, the empirical constant.
  double max_fitted_c = 0.0;
  /// Largest fitted_c over every valid row, including the signed parts.
  double max_fitted_c_parts = 0.0;
  /// Worst relative defect of ||u||_q^q = ||f||_q^q + ||g||_q^q over finite q.
  double decomposition_defect = 0.0;
};

/// Rows for u, then for its positive and negative parts, in query order.
/// Queries with q < p become rejected rows; a part that vanishes identically
/// yields rows tagged with an error.
RHIReport verify_rhi(const ScalarField& u, const BoundConstants& constants, const std::vector<NormQuery>& queries,
                     const Grid& grid);

struct MoserStep {
  int i = 0;
  double tau = 0.0;
  double norm = 0.0;
  /// ||f||_{tau omega} / ||f||_tau; zero on the last row.
  double step_ratio = 0.0;
  /// C_alpha^(1/tau) tau^(2/(tau(2-alpha))).
  double step_bound = 0.0;
  double implied_constant = 0.0;
};

struct MoserTrace {
  double p = 0.0;
  double omega = 0.0;
  std::vector<MoserStep> rows;
  double max_implied = 0.0;
  double min_implied = 0.0;
  /// max_implied / min_implied - 1.
  double variation = 0.0;
  /// Product of the step bounds over the computed steps.
  double bound_product = 0.0;
  /// Product of the first 20 step bounds.
  double bound_product_20 = 0.0;
  /// Infinite product C^(n/2p) p^(n/(p(2-alpha))) omega^(n(n-2)/(2p(2-alpha))).
  double bound_product_limit = 0.0;
  /// C^(n/2p) p^(n/(p(2-alpha))), the closed form without the omega factor.
  double closed_form = 0.0;
  /// sum_{k=1..20} 1/tau_{k-1} and its limit n / (2p).
  double exponent_sum_20 = 0.0;
  double exponent_limit = 0.0;
};

/// Norms of f along tau_i = p omega^i, i = 0..levels. Throws HypothesisError
/// for p < 2 and ConfigError for n < 3, levels < 1 or a negative entry of f.
MoserTrace moser_trace(const ScalarField& f, double p, const BoundConstants& constants, int levels,
                       const Grid& grid);

struct PayneRaynerRecord {
  double lambda = 0.0;
  double norm1 = 0.0;
  double norm2 = 0.0;
  /// (||u||_2 / ||u||_1)^2
  double ratio_sq = 0.0;
  double lambda_over_4pi = 0.0;
  /// 1 - ratio_sq / lambda_over_4pi; zero at equality, positive when strict.
  double gap = 0.0;
  double residual = 0.0;
};

/// First Dirichlet eigenpair of -Laplace on a planar mask and the two sides of
/// ||u||_2^2 <= (lambda / 4 pi) ||u||_1^2. Throws ConfigError unless n = 2 and
/// SolverError when the eigensolver fails.
PayneRaynerRecord payne_rayner_check(const DomainRef& mask, const SolverConfig& config);

}  // namespace rhlab
