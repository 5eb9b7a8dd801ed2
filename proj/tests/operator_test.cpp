#include "doctest.h"
#include "rhlab/elliptic_operator.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/potentials.hpp"
#include "support.hpp"

using namespace testing;

namespace {

SparseOperator laplacian(const DomainRef& mask) {
  return assemble(mask, CoefficientField::identity(), ScalarField(mask->interior_count(), 0.0));
}

// Smallest eigenvalue of a symmetric 3x3 matrix by the trigonometric formula.
double smallest_symmetric_eigenvalue(const Matrix& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) return std::min({a[0][0], a[1][1], a[2][2]});
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Matrix b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                     b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double phi = std::acos(std::clamp(det / 2.0, -1.0, 1.0)) / 3.0;
  return q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
}

}  // namespace

TEST_SUITE("elliptic-operator") {
  TEST_CASE("identity coefficient gives the seven-point Laplacian") {
    const auto mask = unit_box(3, 9);
    const double h = 1.0 / 8;
    const SparseOperator op = laplacian(mask);
    const CsrMatrix& a = op.matrix();
    for (std::size_t i = 0; i < op.size(); ++i) {
      CHECK(a.at(i, i) == doctest::Approx(6.0 / (h * h)).epsilon(1e-14));
      const auto cols = a.col();
      const auto vals = a.val();
      for (auto k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        if (static_cast<std::size_t>(cols[k]) != i) CHECK(vals[k] == doctest::Approx(-1.0 / (h * h)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("constant diagonal coefficient conserves: deep-interior row sums vanish") {
    const auto mask = unit_box(3, 9);
    const SparseOperator op = assemble(mask, CoefficientField::diagonal_matrix({2.0, 3.0, 4.0}),
                                       ScalarField(mask->interior_count(), 0.0));
    const Grid& g = mask->grid();
    const ScalarField ones(op.size(), 1.0);
    const ScalarField rows = op.apply(ones);
    for (std::size_t i = 0; i < op.size(); ++i) {
      const NodeIndex idx = g.multi_index(mask->node_of(i));
      bool deep = true;
      for (int d = 0; d < 3; ++d) deep = deep && idx[static_cast<std::size_t>(d)] >= 2 && idx[static_cast<std::size_t>(d)] <= 6;
      if (deep) CHECK(std::abs(rows[i]) < 1e-10);
    }
  }

  TEST_CASE("antisymmetric part of the coefficient drops out of the quadratic form") {
    const auto mask = unit_box(3, 9);
    const ScalarField v0(mask->interior_count(), 0.0);
    const CoefficientField rot = CoefficientField::rotation(0.5);
    const SparseOperator full = assemble(mask, rot, v0);
    const SparseOperator sym = assemble(mask, symmetric_part(rot), v0);
    CHECK_FALSE(full.symmetric());
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const ScalarField v = random_field(full.size(), seed);
      CHECK(rel(full.quadratic_form(v), sym.quadratic_form(v)) < 1e-10);
    }
  }

  TEST_CASE("symmetric coefficients assemble to symmetric matrices") {
    const auto mask = unit_box(3, 9);
    const ScalarField v = sample_potential(BallWell{-3.0, {0.5, 0.5, 0.5}, 0.3}, *mask);
    for (const auto& coeff : {CoefficientField::identity(), CoefficientField::shear(0.5),
                              CoefficientField::diagonal_matrix({2.0, 3.0, 4.0})}) {
      const SparseOperator op = assemble(mask, coeff, v);
      CHECK(op.matrix().max_asymmetry() <= 1e-12 * op.matrix().max_abs());
    }
  }

  TEST_CASE("ellipticity constant") {
    const auto mask = unit_box(3, 9);
    CHECK(ellipticity_constant(CoefficientField::identity(), *mask) == doctest::Approx(1.0));
    CHECK(ellipticity_constant(CoefficientField::diagonal_matrix({2.0, 3.0, 4.0}), *mask) == doctest::Approx(2.0));

    // Shear: x_1 is sampled at nodes, face midpoints and plane-cell centers,
    // i.e. on the half-spacing lattice between the first and last interior node.
    const CoefficientField shear = CoefficientField::shear(0.5);
    const double h = 1.0 / 8;
    double oracle = 1e300;
    for (int k = 1; k <= 15; ++k) {
      const Point x{k * h / 2, 0.5, 0.5};
      oracle = std::min(oracle, smallest_symmetric_eigenvalue(shear(x)));
    }
    CHECK(ellipticity_constant(shear, *mask) == doctest::Approx(oracle).epsilon(1e-12));

    Matrix bad{};
    bad[0][0] = 1.0;
    bad[1][1] = -1.0;
    bad[2][2] = 1.0;
    CHECK_THROWS_AS(ellipticity_constant(CoefficientField::constant_matrix(bad), *mask), HypothesisError);
  }

  TEST_CASE("non-finite coefficients are rejected") {
    const auto mask = unit_box(2, 5);
    Matrix a{};
    a[0][0] = a[1][1] = a[2][2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(assemble(mask, CoefficientField::constant_matrix(a), ScalarField(mask->interior_count(), 0.0)),
                    ConfigError);
  }

  TEST_CASE("weak residual of the exact discrete eigenpair vanishes") {
    const auto mask = unit_box(3, 17);
    const SparseOperator op = laplacian(mask);
    const double lambda = discrete_sine_eigenvalue(3, 1.0 / 16);
    CHECK(weak_residual(op, lambda, sine_mode(*mask)) <= 1e-10 * lambda);
    CHECK(weak_residual(op, discrete_sine_eigenvalue(3, 1.0 / 16, {2, 1, 3}), sine_mode(*mask, {2, 1, 3})) <= 1e-9);
    CHECK_THROWS_AS(weak_residual(op, 1.0, ScalarField(op.size(), 0.0)), DegenerateInputError);
  }

  TEST_CASE("weak residual of a random vector is bounded below by the first eigenvalue") {
    const auto mask = unit_box(3, 17);
    const SparseOperator op = laplacian(mask);
    const double lambda1 = discrete_sine_eigenvalue(3, 1.0 / 16);
    for (unsigned seed = 1; seed <= 3; ++seed) CHECK(weak_residual(op, 0.0, random_field(op.size(), seed)) >= lambda1);
  }

  TEST_CASE("coercivity against the Laplacian") {
    const auto mask = unit_box(3, 9);
    const ScalarField v = sample_potential(BallWell{2.0, {0.5, 0.5, 0.5}, 0.3}, *mask);
    const CoefficientField coeff = CoefficientField::shear(0.5);
    const SparseOperator op = assemble(mask, coeff, v);
    const SparseOperator lap = laplacian(mask);
    const double ellipticity = ellipticity_constant(coeff, *mask);
    for (unsigned seed = 10; seed < 20; ++seed) {
      const ScalarField w = random_field(op.size(), seed);
      CHECK(op.quadratic_form(w) >= ellipticity * lap.quadratic_form(w) * (1 - 1e-12));
    }
  }

  TEST_CASE("second-order consistency with a variable coefficient") {
    const double e1 = shear_consistency_error(17);
    const double e2 = shear_consistency_error(33);
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.6);
    CHECK(ratio <= 4.4);
  }
}
