#include "rhlab/rhi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "rhlab/errors.hpp"
#include "rhlab/norms.hpp"

namespace rhlab {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw HypothesisError("alpha must lie in (0, 2)");
}

void check_dimension(int n) {
  if (n < 3) throw ConfigError("the reverse Hölder factor needs n >= 3 (omega = n/(n-2))");
}

double omega_of(int n) { return static_cast<double>(n) / (n - 2); }

class NormCache {
 public:
  NormCache(const ScalarField& u, const Grid& grid) : u_(u), grid_(grid) {}
  double operator()(double p) {
    const auto it = cache_.find(p);
    if (it != cache_.end()) return it->second;
    const double v = lp_norm(u_, p, grid_);
    cache_.emplace(p, v);
    return v;
  }

 private:
  const ScalarField& u_;
  const Grid& grid_;
  std::map<double, double> cache_;
};

}  // namespace

double c_alpha(double alpha, double cn, double ellipticity, double mc) {
  check_alpha(alpha);
  if (!(ellipticity > 0.0)) throw HypothesisError("ellipticity constant must be positive");
  if (!(cn >= 0.0) || !(mc >= 0.0)) throw ConfigError("C_n and the potential norm must be nonnegative");
  return 1.0 + std::pow(alpha, alpha / (2.0 - alpha)) * std::pow(2.0 * cn * mc / ellipticity, 2.0 / (2.0 - alpha));
}

BoundConstants make_bound_constants(int n, double ellipticity, double lambda, double alpha, double r, double cn,
                                    double mc) {
  check_alpha(alpha);
  if (!(r > 2.0 / alpha)) throw HypothesisError("the potential class needs r > 2/alpha");
  BoundConstants c;
  c.n = n;
  c.ellipticity = ellipticity;
  c.lambda = lambda;
  c.alpha = alpha;
  c.r = r;
  c.cn = cn;
  c.mc = mc;
  c.c_alpha = c_alpha(alpha, cn, ellipticity, mc);
  return c;
}

double growth_factor(int n, double p, double alpha, double c_alpha) {
  check_dimension(n);
  check_alpha(alpha);
  if (!(p > 0.0)) throw ConfigError("norm exponent p must be positive");
  if (!(c_alpha >= 1.0)) throw ConfigError("C_alpha must be at least 1");
  const double s = p * (2.0 - alpha);
  return std::pow(c_alpha, n / (2.0 * p)) * std::pow(std::max(p, 2.0), n / s) *
         std::pow(omega_of(n), n * (n - 2) / s);
}

double telescoped_growth_factor(int n, double p, double alpha, double c_alpha) {
  const double full = growth_factor(n, p, alpha, c_alpha);
  // Halve the omega exponent.
  return full / std::pow(omega_of(n), n * (n - 2) / (2.0 * p * (2.0 - alpha)));
}

double exponent_partial_sum(int n, double p, int terms) {
  check_dimension(n);
  const double omega = omega_of(n);
  double tau = p;
  double sum = 0.0;
  for (int k = 1; k <= terms; ++k) {
    sum += 1.0 / tau;
    tau *= omega;
  }
  return sum;
}

RHIReport verify_rhi(const ScalarField& u, const BoundConstants& constants, const std::vector<NormQuery>& queries,
                     const Grid& grid) {
  const SignedParts parts = signed_parts(u);
  const std::pair<const char*, const ScalarField*> fields[] = {
      {"u", &u}, {"f", &parts.positive}, {"g", &parts.negative}};
  NormCache caches[] = {NormCache(u, grid), NormCache(parts.positive, grid), NormCache(parts.negative, grid)};

  RHIReport report;
  for (int k = 0; k < 3; ++k) {
    const bool vanishes = caches[k](std::numeric_limits<double>::infinity()) == 0.0;
    for (const NormQuery& query : queries) {
      RHIRow row;
      row.part = fields[k].first;
      row.p = query.p;
      row.q = query.q;
      if (!(query.p > 0.0) || !(query.q >= query.p)) {
        row.error = "rejected: needs q >= p > 0";
      } else if (vanishes) {
        row.error = "part vanishes identically";
      } else {
        row.norm_p = caches[k](query.p);
        row.norm_q = caches[k](query.q);
        row.ratio = row.norm_q / row.norm_p;
        row.factor = growth_factor(constants.n, query.p, constants.alpha, constants.c_alpha);
        row.telescoped_factor = telescoped_growth_factor(constants.n, query.p, constants.alpha, constants.c_alpha);
        row.fitted_c = row.ratio / row.factor;
        row.satisfied = row.ratio <= row.factor;
        if (!std::isfinite(row.fitted_c) || !(row.ratio > 0.0)) row.error = "non-finite ratio";
      }
      if (row.error.empty()) {
        if (k == 0) report.max_fitted_c = std::max(report.max_fitted_c, row.fitted_c);
        report.max_fitted_c_parts = std::max(report.max_fitted_c_parts, row.fitted_c);
      }
      report.rows.push_back(row);
    }
  }

  for (const NormQuery& query : queries) {
    for (double e : {query.p, query.q}) {
      if (!(e > 0.0) || std::isinf(e)) continue;
      const double whole = std::pow(caches[0](e), e);
      if (whole == 0.0) continue;
      const double split = std::pow(caches[1](e), e) + std::pow(caches[2](e), e);
      report.decomposition_defect = std::max(report.decomposition_defect, std::abs(whole - split) / whole);
    }
  }
  return report;
}

MoserTrace moser_trace(const ScalarField& f, double p, const BoundConstants& constants, int levels,
                       const Grid& grid) {
  if (!(p >= 2.0)) {
    throw HypothesisError(
        "the Moser ladder starts at tau = p >= 2; exponents p < 2 are reached from the p = 2 bound through the "
        "max{p,2} factor of the growth factor, not by iterating");
  }
  check_dimension(constants.n);
  check_alpha(constants.alpha);
  if (levels < 1) throw ConfigError("the Moser ladder needs at least one level");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0.0) throw ConfigError("the Moser ladder runs on a nonnegative part of u");
  }
  const int n = constants.n;
  const double alpha = constants.alpha;
  const double c = constants.c_alpha;
  MoserTrace trace;
  trace.p = p;
  trace.omega = omega_of(n);
  auto step_bound = [&](double tau) { return std::pow(c, 1.0 / tau) * std::pow(tau, 2.0 / (tau * (2.0 - alpha))); };

  double tau = p;
  for (int i = 0; i <= levels; ++i) {
    MoserStep step;
    step.i = i;
    step.tau = tau;
    step.norm = lp_norm(f, tau, grid);
    step.step_bound = step_bound(tau);
    trace.rows.push_back(step);
    tau *= trace.omega;
  }
  trace.bound_product = 1.0;
  trace.max_implied = 0.0;
  trace.min_implied = std::numeric_limits<double>::infinity();
  for (int i = 0; i < levels; ++i) {
    MoserStep& s = trace.rows[static_cast<std::size_t>(i)];
    s.step_ratio = trace.rows[static_cast<std::size_t>(i) + 1].norm / s.norm;
    s.implied_constant = s.step_ratio / s.step_bound;
    trace.max_implied = std::max(trace.max_implied, s.implied_constant);
    trace.min_implied = std::min(trace.min_implied, s.implied_constant);
    trace.bound_product *= s.step_bound;
  }
  trace.variation = trace.max_implied / trace.min_implied - 1.0;

  trace.bound_product_20 = 1.0;
  tau = p;
  for (int i = 0; i < 20; ++i) {
    trace.bound_product_20 *= step_bound(tau);
    tau *= trace.omega;
  }
  trace.closed_form = std::pow(c, n / (2.0 * p)) * std::pow(p, n / (p * (2.0 - alpha)));
  trace.bound_product_limit =
      trace.closed_form * std::pow(trace.omega, n * (n - 2) / (2.0 * p * (2.0 - alpha)));
  trace.exponent_sum_20 = exponent_partial_sum(n, p, 20);
  trace.exponent_limit = n / (2.0 * p);
  return trace;
}

PayneRaynerRecord payne_rayner_check(const DomainRef& mask, const SolverConfig& config) {
  if (mask->dim() != 2) throw ConfigError("the Payne-Rayner check is planar (n = 2)");
  const SparseOperator op =
      assemble(mask, CoefficientField::identity(), ScalarField(mask->interior_count(), 0.0));
  const EigenResult result = smallest_eigenpairs(op, 1, config);
  if (!result.converged) throw SolverError(result.failure, std::numeric_limits<double>::quiet_NaN());
  const EigenPair& pair = result.pairs.front();
  PayneRaynerRecord rec;
  rec.lambda = pair.lambda;
  rec.residual = pair.residual;
  rec.norm1 = lp_norm(pair.u, 1.0, mask->grid());
  rec.norm2 = lp_norm(pair.u, 2.0, mask->grid());
  rec.ratio_sq = std::pow(rec.norm2 / rec.norm1, 2);
  rec.lambda_over_4pi = pair.lambda / (4.0 * std::numbers::pi);
  rec.gap = 1.0 - rec.ratio_sq / rec.lambda_over_4pi;
  return rec;
}

}  // namespace rhlab
