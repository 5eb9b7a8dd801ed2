#pragma once

#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"

namespace rhlab {

/// (sum_i |u_i|^p h^n)^(1/p) for finite p, max_i |u_i| for p = infinity.
/// Quasi-norms for p < 1 use the same formula. Throws ConfigError for p <= 0.
double lp_norm(const ScalarField& u, double p, const Grid& grid);

/// (sum over cell faces of |difference quotient|^2 h^n)^(1/2) for u extended by
/// zero to the exterior nodes; faces next to the boundary use one-sided quotients.
double h1_seminorm(const ScalarField& u, const DomainMask& mask);

struct SignedParts {
  /// max(u, 0)
  ScalarField positive;
  /// -min(u, 0)
  ScalarField negative;
};

SignedParts signed_parts(const ScalarField& u);

}  // namespace rhlab
