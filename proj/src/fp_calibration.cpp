#include "rhlab/fp_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rhlab/errors.hpp"
#include "rhlab/norms.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct Bump {
  Point center{};
  double width = 0.0;
};

ScalarField sample_field(const DomainMask& mask, const std::function<double(const Point&)>& f) {
  ScalarField out(mask.interior_count(), 0.0);
  parallel::for_blocks(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = f(mask.coordinate(i));
  });
  return out;
}

}  // namespace

TestBank make_test_bank(const DomainRef& mask_ref, std::size_t size, std::uint64_t seed) {
  if (size == 0) throw ConfigError("test bank must not be empty");
  const DomainMask& mask = *mask_ref;
  const Grid& grid = mask.grid();
  const int dim = grid.dim;
  double shortest = grid.extent[0];
  for (int d = 1; d < dim; ++d) shortest = std::min(shortest, grid.extent[d]);
  Point middle{};
  for (int d = 0; d < dim; ++d) middle[d] = grid.origin[d] + 0.5 * grid.extent[d];
  const double min_width = std::max(2.0 * grid.max_spacing(), 0.05 * shortest);

  auto window = [&](const Point& x, int first_mode) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int mode = d == 0 ? first_mode : 1;
      w *= std::sin(mode * std::numbers::pi * (x[d] - grid.origin[d]) / grid.extent[d]);
    }
    return w;
  };
  auto bump_field = [&](const Bump& b) {
    return sample_field(mask, [&](const Point& x) {
      const double r2 = std::pow(distance(x, b.center, dim), 2);
      return std::exp(-r2 / (2.0 * b.width * b.width)) * window(x, 1);
    });
  };

  TestBank bank;
  bank.mask = mask_ref;
  bank.seed = seed;
  const double centered_widths[] = {0.06, 0.1, 0.16, 0.25};
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < size; ++i) {
    std::ostringstream label;
    if (i < 4) {
      const Bump b{middle, std::max(min_width, centered_widths[i] * shortest)};
      bank.fields.push_back(bump_field(b));
      label << "centered-bump width=" << b.width;
    } else if (i < 6) {
      const int mode = i == 4 ? 1 : 2;
      bank.fields.push_back(sample_field(mask, [&](const Point& x) { return window(x, mode); }));
      label << "sine-product mode=" << mode;
    } else {
      Bump b;
      for (int d = 0; d < dim; ++d) {
        b.center[d] = uniform(gen, grid.origin[d] + 0.2 * grid.extent[d], grid.origin[d] + 0.8 * grid.extent[d]);
      }
      b.width = uniform(gen, min_width, std::max(min_width, 0.3 * shortest));
      bank.fields.push_back(bump_field(b));
      label << "random-bump width=" << b.width;
    }
    bank.labels.push_back(label.str());
  }
  return bank;
}

FpWeight make_fp_weight(const PotentialSpec& v, double r, const DomainMask& mask, const MCParams& search) {
  if (!(r > 1.0)) throw HypothesisError("the Fefferman-Phong inequality needs r > 1; it fails for r = 1");
  validate_weight(v);
  if (!is_nonnegative(v)) throw ConfigError("Fefferman-Phong weight must be nonnegative");
  FpWeight w;
  w.spec = v;
  w.r = r;
  w.samples = sample_potential(v, mask);
  MCParams params = search;
  params.alpha = 2.0;
  params.r = r;
  w.norm = mc_norm(v, params, mask);
  return w;
}

double weighted_dirichlet_quotient(const ScalarField& g, const ScalarField& weight, const DomainMask& mask) {
  check_field(g, mask);
  check_field(weight, mask);
  const double gradient = h1_seminorm(g, mask);
  if (!(gradient > 0.0)) throw DegenerateInputError("test function has zero gradient");
  const double numerator =
      parallel::blocked_sum(g.size(), [&](std::size_t i) { return g[i] * g[i] * weight[i]; }) *
      mask.grid().cell_volume();
  return numerator / (gradient * gradient);
}

double fp_ratio(const ScalarField& g, const FpWeight& weight, const DomainMask& mask) {
  const double q = weighted_dirichlet_quotient(g, weight.samples, mask);
  if (q == 0.0) return 0.0;
  return q / weight.norm.value;
}

double fp_ratio(const ScalarField& g, const PotentialSpec& v, double r, const DomainMask& mask) {
  return fp_ratio(g, make_fp_weight(v, r, mask), mask);
}

double hardy_quotient(const ScalarField& g, const Point& center, const DomainMask& mask) {
  const PotentialSpec v = PowerLaw{1.0, center, 2.0};
  validate_weight(v);
  return weighted_dirichlet_quotient(g, sample_potential(v, mask), mask);
}

CnEstimate estimate_cn(const TestBank& bank, const std::vector<FpWeight>& weights) {
  if (bank.fields.empty() || weights.empty()) throw ConfigError("calibration needs a test function and a weight");
  const DomainMask& mask = *bank.mask;
  const std::size_t nw = weights.size();
  const std::size_t total = bank.size() * nw;
  std::vector<double> ratios(total, 0.0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallel::workers())
  for (long long k = 0; k < static_cast<long long>(total); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    ratios[idx] = fp_ratio(bank.fields[idx / nw], weights[idx % nw], mask);
  }
  CnEstimate out;
  out.r = weights.front().r;
  out.n = mask.dim();
  out.bank_size = bank.size();
  out.bank_seed = bank.seed;
  std::size_t best = 0;
  for (std::size_t k = 1; k < total; ++k) {
    if (ratios[k] > ratios[best]) best = k;
  }
  out.value = ratios[best];
  out.degenerate = !(out.value > 0.0);
  out.test_index = best / nw;
  out.potential_index = best % nw;
  out.test_label = bank.labels[out.test_index];
  out.potential = describe(weights[out.potential_index].spec);
  out.weight_norm = weights[out.potential_index].norm.value;
  return out;
}

double gns_ratio(const ScalarField& w, const DomainMask& mask) {
  const int n = mask.dim();
  if (n < 3) throw ConfigError("the Sobolev quotient needs n >= 3");
  const double omega = static_cast<double>(n) / (n - 2);
  const double gradient = h1_seminorm(w, mask);
  if (!(gradient > 0.0)) throw DegenerateInputError("test function has zero gradient");
  const double lp = lp_norm(w, 2.0 * omega, mask.grid());
  return (lp * lp) / (gradient * gradient);
}

double sharp_sobolev_constant(int n) {
  if (n < 3) throw ConfigError("the Sobolev constant needs n >= 3");
  return std::pow(std::tgamma(n) / std::tgamma(0.5 * n), 2.0 / n) / (std::numbers::pi * n * (n - 2));
}

}  // namespace rhlab
