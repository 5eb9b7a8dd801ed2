#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rhlab/elliptic_operator.hpp"
#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"

namespace testing {

using namespace rhlab;

inline constexpr double pi = std::numbers::pi;
inline constexpr double inf = std::numeric_limits<double>::infinity();

/// Unit box [0,1]^dim with the given nodes per axis, box-masked.
inline DomainRef unit_box(int dim, int nodes) {
  const std::vector<double> extents(static_cast<std::size_t>(dim), 1.0);
  const Grid grid = build_grid(dim, extents, nodes);
  return build_domain(grid, DomainShape::box(grid));
}

/// Symmetric box [-half, half]^dim.
inline DomainRef centered_box(int dim, int nodes, double half) {
  const std::vector<double> extents(static_cast<std::size_t>(dim), 2.0 * half);
  const std::vector<double> origin(static_cast<std::size_t>(dim), -half);
  const Grid grid = build_grid(dim, extents, nodes, origin);
  return build_domain(grid, DomainShape::box(grid));
}

template <class F>
ScalarField sample(const DomainMask& mask, F&& f) {
  std::vector<double> v(mask.interior_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mask.coordinate(i));
  return ScalarField(std::move(v));
}

/// prod_d sin(k_d pi x_d) on the unit box.
inline ScalarField sine_mode(const DomainMask& mask, std::array<int, 3> k = {1, 1, 1}) {
  const int dim = mask.dim();
  return sample(mask, [&](const Point& x) {
    double s = 1.0;
    for (int d = 0; d < dim; ++d) s *= std::sin(k[static_cast<std::size_t>(d)] * pi * x[static_cast<std::size_t>(d)]);
    return s;
  });
}

/// Exact eigenvalue of the (2n+1)-point Laplacian for a sine mode.
inline double discrete_sine_eigenvalue(int dim, double h, std::array<int, 3> k = {1, 1, 1}) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    const double t = std::sin(k[static_cast<std::size_t>(d)] * pi * h / 2.0);
    s += 4.0 / (h * h) * t * t;
  }
  return s;
}

inline ScalarField random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = uni(rng);
  return ScalarField(std::move(v));
}

// max |A u - L u| for u = sin sin sin and a = shear(0.5), with L u in closed form.
inline double shear_consistency_error(int nodes) {
  const auto mask = unit_box(3, nodes);
  const SparseOperator op = assemble(mask, CoefficientField::shear(0.5), ScalarField(mask->interior_count(), 0.0));
  const ScalarField u = sine_mode(*mask);
  const ScalarField au = op.apply(u);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point x = mask->coordinate(i);
    const double s1 = std::sin(pi * x[0]), s2 = std::sin(pi * x[1]), s3 = std::sin(pi * x[2]);
    const double c1 = std::cos(pi * x[0]), c2 = std::cos(pi * x[1]);
    const double b = 0.5 * s1;
    const double db = 0.5 * pi * c1;
    // -Laplace u - 2 b d12 u - (d1 b) d2 u
    const double lu = 3 * pi * pi * s1 * s2 * s3 - 2 * b * pi * pi * c1 * c2 * s3 - db * pi * s1 * c2 * s3;
    err = std::max(err, std::abs(au[i] - lu));
  }
  return err;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
