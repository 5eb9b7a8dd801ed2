#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rhlab/mesh.hpp"

namespace rhlab::quadrature {

/// Point singularity of an integrand that behaves like |x - center|^(-exponent).
struct Singularity {
  Point center{};
  double exponent = 0.0;
};

using Integrand = std::function<double(const Point&)>;
/// Integrand in terms of the offset x - center from a singular point.
using OffsetIntegrand = std::function<double(const Point& offset)>;

/// Composite Gauss-Legendre rule on [0, 1] with breakpoints graded towards 0.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Rule& graded_rule();
const Rule& uniform_rule();

/// Integral of f over the box [lower, upper] of R^dim.
///
/// With a singularity inside the closed box, the box is split into sub-boxes
/// that have the singular point as a vertex. Each sub-box is the union of one
/// pyramid per far face with apex at the singular point; on a pyramid the
/// radial variable t in [0, 1] is substituted by t = u^(1/(dim - exponent)),
/// which absorbs t^(dim - 1 - exponent) into the measure, so a pure power law
/// is integrated exactly up to the smooth face quadrature. Requires
/// exponent < dim. Singularities outside the box are ignored.
double box_integral(const Integrand& f, int dim, const Point& lower, const Point& upper,
                    const std::optional<Singularity>& singularity = std::nullopt);

/// Same integral with the integrand given as a function of x - center. Points
/// very close to the singularity keep their full relative precision, which
/// matters when the exponent is close to dim and the mass sits at tiny radii.
double singular_box_integral(const OffsetIntegrand& f, int dim, const Point& lower, const Point& upper,
                             const Singularity& singularity);

}  // namespace rhlab::quadrature
