#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "rhlab/errors.hpp"
#include "rhlab/potentials.hpp"
#include "support.hpp"

using namespace testing;

namespace {

// Integral of 1/|x| over [a0,a1]x[b0,b1]x[c0,c1] (coordinates relative to the
// singular point). The z integral is asinh in closed form; x and y are split
// at zero so tanh-sinh only meets the log singularity at an endpoint.
double inverse_distance_box(double a0, double a1, double b0, double b1, double c0, double c1) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto split = [](double lo, double hi) {
    std::vector<std::pair<double, double>> parts;
    if (lo < 0.0 && hi > 0.0) {
      parts.emplace_back(lo, 0.0);
      parts.emplace_back(0.0, hi);
    } else {
      parts.emplace_back(lo, hi);
    }
    return parts;
  };
  double total = 0.0;
  for (auto [x0, x1] : split(a0, a1)) {
    for (auto [y0, y1] : split(b0, b1)) {
      auto outer = [&](double x) {
        auto inner = [&](double y) {
          const double rho = std::hypot(x, y);
          return std::asinh(c1 / rho) - std::asinh(c0 / rho);
        };
        return ts.integrate(inner, y0, y1);
      };
      total += ts.integrate(outer, x0, x1);
    }
  }
  return total;
}

double cell_oracle(const Point& node, const Point& c, double h) {
  const double v = inverse_distance_box(node[0] - h / 2 - c[0], node[0] + h / 2 - c[0], node[1] - h / 2 - c[1],
                                        node[1] + h / 2 - c[1], node[2] - h / 2 - c[2], node[2] + h / 2 - c[2]);
  return v / (h * h * h);
}

DomainRef big_box() { return centered_box(3, 17, 1.0); }

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("constant potential samples to its value") {
    const auto mask = unit_box(3, 9);
    const ScalarField v = sample_potential(Constant{7.0}, *mask);
    for (double x : v.values()) CHECK(x == 7.0);
  }

  TEST_CASE("power law evaluates pointwise away from its cell") {
    const auto mask = unit_box(3, 9);
    const PowerLaw coulomb{-5.0, {0.5 + 1.0 / 16, 0.5 + 1.0 / 16, 0.5 + 1.0 / 16}, 1.0};
    const Point x{coulomb.center[0] + 0.25, coulomb.center[1], coulomb.center[2]};
    CHECK(evaluate(coulomb, x, 3) == doctest::Approx(-20.0).epsilon(1e-14));
    const ScalarField v = sample_potential(coulomb, *mask);
    for (std::size_t i = 0; i < mask->interior_count(); ++i) {
      const Point y = mask->coordinate(i);
      if (distance(y, coulomb.center, 3) > 0.125) CHECK(v[i] == doctest::Approx(evaluate(coulomb, y, 3)).epsilon(1e-15));
    }
  }

  TEST_CASE("singular cell average matches an independent quadrature") {
    const double h = 1.0 / 8;
    const std::vector<double> ext{1.0, 1.0, 1.0};
    const Grid g = build_grid(3, ext, 9);
    const Point node{0.5, 0.5, 0.5};
    SUBCASE("singularity at a cell corner") {
      const Point c{0.5 + h / 2, 0.5 + h / 2, 0.5 + h / 2};
      CHECK(rel(cell_average(PowerLaw{1.0, c, 1.0}, g, node), cell_oracle(node, c, h)) < 1e-2);
    }
    SUBCASE("singularity inside a cell") {
      const Point c{0.5 + 0.3 * h, 0.5 - 0.1 * h, 0.5 + 0.2 * h};
      const double oracle = cell_oracle(node, c, h);
      CHECK(rel(cell_average(PowerLaw{1.0, c, 1.0}, g, node), oracle) < 1e-2);
      CHECK(rel(cell_average(PowerLaw{-3.0, c, 1.0}, g, node), -3.0 * oracle) < 1e-2);
    }
  }

  TEST_CASE("a node on a singularity is rejected and the offset fixes it") {
    const auto mask = unit_box(3, 9);
    const PowerLaw on_node{1.0, {0.5, 0.5, 0.5}, 1.0};
    CHECK_THROWS_AS(sample_potential(on_node, *mask), ConfigError);
    const PotentialSpec moved = offset_singular_centers(on_node, mask->grid());
    const ScalarField v = sample_potential(moved, *mask);
    for (double x : v.values()) CHECK(std::isfinite(x));
  }

  TEST_CASE("power-law invariants") {
    CHECK_THROWS_AS(validate(PowerLaw{1.0, {}, 2.0}), ConfigError);
    CHECK_THROWS_AS(validate(PowerLaw{1.0, {}, 0.0}), ConfigError);
    CHECK_NOTHROW(validate_weight(PowerLaw{1.0, {}, 2.0}));
    CHECK_THROWS_AS(validate(PotentialSum{}), ConfigError);
  }

  TEST_CASE("closed-form Morrey-Campanato norm of a power law") {
    const double two_sqrt_pi = 2.0 * std::sqrt(pi);
    CHECK(*mc_norm_analytic(PowerLaw{1.0, {}, 1.0}, 1.0, 2.0, 3) == doctest::Approx(two_sqrt_pi).epsilon(1e-14));
    CHECK(*mc_norm_analytic(PowerLaw{-2.0, {}, 1.0}, 1.0, 2.0, 3) == doctest::Approx(2 * two_sqrt_pi).epsilon(1e-14));
    CHECK_THROWS_AS(mc_norm_analytic(PowerLaw{1.0, {}, 1.0}, 1.0, 3.0, 3), HypothesisError);
    CHECK_FALSE(mc_norm_analytic(Constant{1.0}, 1.0, 2.0, 3).has_value());
  }

  TEST_CASE("zero potential has zero norm") {
    MCParams params;
    params.r = 2.0;
    CHECK(mc_norm(Constant{0.0}, params, *big_box()).value == 0.0);
  }

  TEST_CASE("class range is enforced") {
    MCParams params;
    params.alpha = 1.0;
    params.r = 1.5;
    CHECK_THROWS_AS(mc_norm(Constant{1.0}, params, *big_box()), HypothesisError);
  }

  TEST_CASE("Coulomb norm sits at the singularity and matches the closed form") {
    const auto mask = big_box();
    const PotentialSpec v = offset_singular_centers(PowerLaw{1.0, {}, 1.0}, mask->grid());
    MCParams params;
    params.r = 2.0;
    params.center_stride = 1;
    const MCNormEstimate est = mc_norm(v, params, *mask);
    CHECK(est.center_is_singular);
    CHECK(rel(est.value, 2.0 * std::sqrt(pi)) < 0.05);
  }

  TEST_CASE("ball well against a lens-volume scan") {
    // B_1(0) with depth 1, alpha = 1, r = 2: value = sup rho^(-1/2) |B_rho(x) cap B_1|^(1/2).
    auto lens = [](double d, double rho) {
      const double R = 1.0;
      if (d >= R + rho) return 0.0;
      if (d <= std::abs(R - rho)) return 4.0 / 3.0 * pi * std::pow(std::min(R, rho), 3);
      const double s = R + rho - d;
      return pi * s * s * (d * d + 2 * d * rho - 3 * rho * rho + 2 * d * R + 6 * rho * R - 3 * R * R) / (12 * d);
    };
    double oracle = 0.0;
    for (int i = 0; i <= 200; ++i) {
      for (int j = 1; j <= 800; ++j) {
        const double d = 2.0 * i / 200;
        const double rho = 4.0 * j / 800;
        oracle = std::max(oracle, std::sqrt(lens(d, rho) / rho));
      }
    }
    CHECK(oracle == doctest::Approx(std::sqrt(4.0 * pi / 3.0)).epsilon(1e-9));

    const auto mask = centered_box(3, 33, 2.0);
    MCParams params;
    params.r = 2.0;
    const MCNormEstimate est = mc_norm(BallWell{1.0, {}, 1.0}, params, *mask);
    CHECK(std::isfinite(est.value));
    CHECK(rel(est.value, oracle) < 0.05);
  }

  TEST_CASE("norm is homogeneous in the amplitude") {
    const auto mask = big_box();
    const PotentialSpec v = offset_singular_centers(PowerLaw{1.0, {}, 1.0}, mask->grid());
    MCParams params;
    params.r = 2.5;
    const double base = mc_norm(v, params, *mask).value;
    for (double c : {-4.0, 3.0, 0.125}) CHECK(rel(mc_norm(scaled(v, c), params, *mask).value, std::abs(c) * base) < 1e-12);
  }

  TEST_CASE("larger radius range never lowers the estimate") {
    const auto mask = big_box();
    const PotentialSpec v = PotentialSum{{offset_singular_centers(PowerLaw{1.0, {}, 1.0}, mask->grid()),
                                          BallWell{0.5, {0.3, 0.0, 0.0}, 0.4}}};
    MCParams params;
    params.r = 2.5;
    double previous = 0.0;
    for (double rho_max : {0.3, 0.6, 1.2, 3.5}) {
      params.rho_max = rho_max;
      const double value = mc_norm(v, params, *mask).value;
      CHECK(value >= previous);
      previous = value;
    }
  }

  TEST_CASE("doubling the center density barely moves the power-law estimate") {
    const auto mask = centered_box(3, 33, 1.0);
    const PotentialSpec v = offset_singular_centers(PowerLaw{1.0, {}, 1.0}, mask->grid());
    MCParams params;
    params.r = 2.0;
    params.center_stride = 4;
    const double coarse = mc_norm(v, params, *mask).value;
    params.center_stride = 2;
    const double fine = mc_norm(v, params, *mask).value;
    CHECK(rel(fine, coarse) < 0.02);
    CHECK(rel(fine, 2.0 * std::sqrt(pi)) < 0.05);
  }
}
