#include <boost/math/quadrature/exp_sinh.hpp>

#include "doctest.h"
#include "rhlab/errors.hpp"
#include "rhlab/fp_calibration.hpp"
#include "rhlab/norms.hpp"
#include "support.hpp"

using namespace testing;

namespace {

struct Calibration {
  DomainRef mask = centered_box(3, 33, 1.0);
  PotentialSpec inverse_square = offset_singular_centers(PowerLaw{1.0, {}, 2.0}, mask->grid());
  Point center = std::get<PowerLaw>(inverse_square.term()).center;
  FpWeight weight = make_fp_weight(inverse_square, 1.4, *mask);
};

const Calibration& calibration() {
  static const Calibration c;
  return c;
}

ScalarField times(const ScalarField& u, double c) {
  ScalarField out = u;
  for (auto& v : out.values()) v *= c;
  return out;
}

}  // namespace

TEST_SUITE("fp-calibration") {
  TEST_CASE("test banks are deterministic prefixes") {
    const auto& cal = calibration();
    const TestBank a = make_test_bank(cal.mask, 8, 42);
    const TestBank b = make_test_bank(cal.mask, 20, 42);
    const TestBank c = make_test_bank(cal.mask, 20, 43);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.fields[i].data() == b.fields[i].data());
      CHECK(a.labels[i] == b.labels[i]);
    }
    CHECK(b.fields[10].data() != c.fields[10].data());
    CHECK_THROWS_AS(make_test_bank(cal.mask, 0, 1), ConfigError);
  }

  TEST_CASE("weight preconditions") {
    const auto& cal = calibration();
    CHECK_THROWS_AS(make_fp_weight(cal.inverse_square, 1.0, *cal.mask), HypothesisError);
    CHECK_THROWS_AS(make_fp_weight(Constant{-1.0}, 1.4, *cal.mask), ConfigError);
    CHECK_THROWS_AS(fp_ratio(ScalarField(cal.mask->interior_count(), 0.0), cal.weight, *cal.mask), DegenerateInputError);
  }

  TEST_CASE("zero weight gives zero ratio and a degenerate estimate") {
    const auto& cal = calibration();
    const FpWeight zero = make_fp_weight(Constant{0.0}, 1.4, *cal.mask);
    const TestBank bank = make_test_bank(cal.mask, 4, 7);
    CHECK(fp_ratio(bank.fields[0], zero, *cal.mask) == 0.0);
    const CnEstimate est = estimate_cn(bank, {zero});
    CHECK(est.value == 0.0);
    CHECK(est.degenerate);
  }

  TEST_CASE("ratios are scale invariant in the test function") {
    const auto& cal = calibration();
    const TestBank bank = make_test_bank(cal.mask, 6, 9);
    for (const auto& g : bank.fields) {
      const ScalarField cg = times(g, 3.7);
      CHECK(rel(fp_ratio(cg, cal.weight, *cal.mask), fp_ratio(g, cal.weight, *cal.mask)) < 1e-10);
      CHECK(rel(gns_ratio(cg, *cal.mask), gns_ratio(g, *cal.mask)) < 1e-10);
      CHECK(rel(hardy_quotient(cg, cal.center, *cal.mask), hardy_quotient(g, cal.center, *cal.mask)) < 1e-10);
    }
  }

  TEST_CASE("Hardy domination over the bank") {
    const auto& cal = calibration();
    const TestBank bank = make_test_bank(cal.mask, 16, 12345);
    const double hardy = 4.0;  // 4 / (n - 2)^2 for n = 3
    for (std::size_t i = 0; i < bank.size(); ++i) {
      const double fp = fp_ratio(bank.fields[i], cal.weight, *cal.mask);
      CAPTURE(bank.labels[i]);
      CHECK(fp > 0.0);
      CHECK(fp * cal.weight.norm.value <= hardy * 1.05);
      CHECK(hardy_quotient(bank.fields[i], cal.center, *cal.mask) <= hardy * 1.05);
    }
  }

  TEST_CASE("estimate is positive, monotone and saturates with the bank") {
    const auto& cal = calibration();
    const CnEstimate small = estimate_cn(make_test_bank(cal.mask, 16, 12345), {cal.weight});
    const CnEstimate large = estimate_cn(make_test_bank(cal.mask, 32, 12345), {cal.weight});
    CHECK(small.value > 0.0);
    CHECK_FALSE(small.degenerate);
    CHECK(large.value >= small.value);
    CHECK(rel(large.value, small.value) < 0.05);
    CHECK(small.r == 1.4);
    CHECK(small.n == 3);
    CHECK(small.bank_size == 16);
  }

  TEST_CASE("scaling the weight leaves the estimate unchanged") {
    const auto& cal = calibration();
    const TestBank bank = make_test_bank(cal.mask, 8, 5);
    const FpWeight four = make_fp_weight(scaled(cal.inverse_square, 4.0), 1.4, *cal.mask);
    CHECK(rel(estimate_cn(bank, {four}).value, estimate_cn(bank, {cal.weight}).value) < 1e-12);
  }

  TEST_CASE("sharp Sobolev constant against radial quadrature of the extremal") {
    // w = (1 + r^2)^(-1/2) in R^3: ||w||_6^2 / ||grad w||_2^2.
    boost::math::quadrature::exp_sinh<double> es;
    const double sphere = 4.0 * pi;
    // Integrands in t = 1 / (1 + r^2), where r^2 t = 1 - t, so nothing overflows.
    const double w6 = sphere * es.integrate([](double r) {
      const double t = 1 / (1 + r * r);
      return (1 - t) * t * t;
    });
    const double grad = sphere * es.integrate([](double r) {
      const double t = 1 / (1 + r * r);
      return (1 - t) * (1 - t) * t;
    });
    const double oracle = std::cbrt(w6) / grad;
    CHECK(sharp_sobolev_constant(3) == doctest::Approx(oracle).epsilon(1e-10));
    CHECK_THROWS_AS(sharp_sobolev_constant(2), ConfigError);
  }

  TEST_CASE("Sobolev quotient of the sine product") {
    const auto mask = unit_box(3, 33);
    // int sin^6 = 5/16 per axis; ||grad||^2 = 3 pi^2 / 8.
    const double oracle = (5.0 / 16.0) / (3 * pi * pi / 8);
    CHECK(rel(gns_ratio(sine_mode(*mask), *mask), oracle) < 0.02);
    CHECK_THROWS_AS(gns_ratio(ScalarField(unit_box(2, 9)->interior_count(), 1.0), *unit_box(2, 9)), ConfigError);
  }

  TEST_CASE("Sobolev quotient over the bank stays below the sharp constant") {
    const auto& cal = calibration();
    const TestBank bank = make_test_bank(cal.mask, 16, 12345);
    const double bound = sharp_sobolev_constant(3) * 1.1;
    for (std::size_t i = 0; i < bank.size(); ++i) {
      CAPTURE(bank.labels[i]);
      CHECK(gns_ratio(bank.fields[i], *cal.mask) <= bound);
    }
  }
}
