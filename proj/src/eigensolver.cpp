#include "rhlab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

using Vec = std::vector<double>;

// y = x + beta * y
void xpby(const Vec& x, double beta, Vec& y) {
  parallel::for_blocks(x.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) y[i] = x[i] + beta * y[i];
  });
}

void project_out(const std::vector<Vec>& basis, Vec& v) {
  for (const Vec& q : basis) parallel::axpy(-parallel::dot(q, v), q, v);
}

// A - shift I, composed with the orthogonal projector onto the complement of
// an orthonormal basis when deflating.
class ShiftedOperator {
 public:
  ShiftedOperator(const SparseOperator& op, double shift, const std::vector<Vec>& basis)
      : op_(op), shift_(shift), basis_(basis), inv_diag_(op.matrix().diagonal()) {
    bool positive = true;
    for (double d : inv_diag_) positive = positive && d - shift > 0.0;
    for (double& d : inv_diag_) d = positive ? 1.0 / (d - shift) : 1.0;
  }

  void apply(const Vec& x, Vec& y) const {
    op_.apply(x, y);
    parallel::axpy(-shift_, x, y);
    project_out(basis_, y);
  }

  void precondition(const Vec& r, Vec& z) const {
    parallel::for_blocks(r.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) z[i] = inv_diag_[i] * r[i];
    });
    project_out(basis_, z);
  }

  void project(Vec& v) const { project_out(basis_, v); }

 private:
  const SparseOperator& op_;
  double shift_;
  const std::vector<Vec>& basis_;
  Vec inv_diag_;
};

std::string residual_message(const char* what, int iterations, double residual) {
  std::ostringstream s;
  s << what << " after " << iterations << " iterations, relative residual " << residual;
  return s.str();
}

// x holds the initial guess on entry and the solution on return.
void conjugate_gradient(const ShiftedOperator& a, const Vec& b, Vec& x, double tol, int max_iterations) {
  const std::size_t n = b.size();
  const double b_norm = parallel::norm2(b);
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  Vec r(n), z(n), p(n), ap(n);
  a.apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  a.project(r);
  double r_norm = parallel::norm2(r);
  if (r_norm <= tol * b_norm) return;
  a.precondition(r, z);
  p = z;
  double rz = parallel::dot(r, z);
  for (int it = 1; it <= max_iterations; ++it) {
    a.apply(p, ap);
    const double curvature = parallel::dot(p, ap);
    if (!(curvature > 0.0)) {
      throw SolverError(residual_message("conjugate gradients met non-positive curvature", it, r_norm / b_norm),
                        r_norm / b_norm);
    }
    const double step = rz / curvature;
    parallel::axpy(step, p, x);
    parallel::axpy(-step, ap, r);
    r_norm = parallel::norm2(r);
    if (r_norm <= tol * b_norm) return;
    a.precondition(r, z);
    const double rz_next = parallel::dot(r, z);
    xpby(z, rz_next / rz, p);
    rz = rz_next;
  }
  throw SolverError(residual_message("conjugate gradients did not converge", max_iterations, r_norm / b_norm),
                    r_norm / b_norm);
}

void bicgstab(const ShiftedOperator& a, const Vec& b, Vec& x, double tol, int max_iterations) {
  const std::size_t n = b.size();
  const double b_norm = parallel::norm2(b);
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  Vec r(n), shadow(n), p(n, 0.0), v(n, 0.0), p_hat(n), s(n), s_hat(n), t(n);
  a.apply(x, v);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
  a.project(r);
  std::fill(v.begin(), v.end(), 0.0);
  double r_norm = parallel::norm2(r);
  if (r_norm <= tol * b_norm) return;
  shadow = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double rho_next = parallel::dot(shadow, r);
    if (rho_next == 0.0 || omega == 0.0) {
      throw SolverError(residual_message("BiCGSTAB broke down", it, r_norm / b_norm), r_norm / b_norm);
    }
    const double beta = (rho_next / rho) * (alpha / omega);
    rho = rho_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    a.precondition(p, p_hat);
    a.apply(p_hat, v);
    const double denom = parallel::dot(shadow, v);
    if (denom == 0.0) {
      throw SolverError(residual_message("BiCGSTAB broke down", it, r_norm / b_norm), r_norm / b_norm);
    }
    alpha = rho / denom;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double s_norm = parallel::norm2(s);
    if (s_norm <= tol * b_norm) {
      parallel::axpy(alpha, p_hat, x);
      return;
    }
    a.precondition(s, s_hat);
    a.apply(s_hat, t);
    const double tt = parallel::dot(t, t);
    omega = tt > 0.0 ? parallel::dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p_hat[i] + omega * s_hat[i];
      r[i] = s[i] - omega * t[i];
    }
    r_norm = parallel::norm2(r);
    if (r_norm <= tol * b_norm) return;
  }
  throw SolverError(residual_message("BiCGSTAB did not converge", max_iterations, r_norm / b_norm), r_norm / b_norm);
}

void solve_shifted(const ShiftedOperator& a, bool symmetric, const Vec& b, Vec& x, double tol, int max_iterations) {
  if (symmetric) {
    conjugate_gradient(a, b, x, tol, max_iterations);
  } else {
    bicgstab(a, b, x, tol, max_iterations);
  }
}

Vec start_vector(std::size_t n, int index) {
  if (index == 0) return Vec(n, 1.0);
  std::mt19937_64 gen(0x5eedULL + static_cast<std::uint64_t>(index));
  Vec v(n);
  for (double& x : v) x = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  return v;
}

// Two passes of Gram-Schmidt against the basis, then unit length.
void orthonormalize(Vec& v, const std::vector<Vec>& basis) {
  project_out(basis, v);
  project_out(basis, v);
  const double norm = parallel::norm2(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw SolverError("iterate collapsed to zero", 0.0);
  parallel::scale(1.0 / norm, v);
}

// min_i (A x)_i / x_i, a lower bound on the smallest eigenvalue of a Z-matrix
// when x is strictly of one sign.
std::optional<double> collatz_wielandt(const Vec& x, const Vec& ax) {
  const bool positive = x[0] > 0.0;
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (positive ? !(x[i] > 0.0) : !(x[i] < 0.0)) return std::nullopt;
    bound = std::min(bound, ax[i] / x[i]);
  }
  return bound;
}

bool single_signed(const Vec& x) {
  double sum = 0.0, max_abs = 0.0;
  for (double v : x) {
    sum += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  const double sign = sum >= 0.0 ? 1.0 : -1.0;
  for (double v : x) {
    if (sign * v < -1e-8 * max_abs) return false;
  }
  return true;
}

struct PairRun {
  Vec x;
  Vec ax;
  double rho = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool used_heuristic_shift = false;
  double shift = 0.0;
  std::string failure;
};

class PowerIteration {
 public:
  PowerIteration(const SparseOperator& op, const SolverConfig& config)
      : op_(op), config_(config), symmetric_(op.symmetric()), z_matrix_(op.matrix().is_z_matrix()),
        scale_(std::max(1.0, op.matrix().max_abs())) {}

  double scale() const { return scale_; }

  PairRun run(int index, const std::vector<Vec>& basis, double shift, bool adaptive, bool allow_heuristic) const {
    const std::size_t n = op_.size();
    PairRun out;
    out.x = start_vector(n, index);
    out.ax.assign(n, 0.0);
    orthonormalize(out.x, basis);
    evaluate(out, basis);

    double sigma = shift;
    double safe = shift;
    // The residual test that admits a heuristic shift; tightened after each
    // overshoot instead of switching the heuristic off.
    double admit = allow_heuristic ? 0.1 : 0.0;
    int complex_hits = 0;
    Vec y(n), x_prev, ax_prev;
    for (int it = 0; it < config_.max_iterations; ++it) {
      out.iterations = it;
      if (out.residual <= config_.tolerance) {
        out.converged = true;
        out.shift = sigma;
        return out;
      }
      const double gap = out.rho - sigma;
      const double eta = std::clamp(0.1 * out.residual / std::max({1.0, std::abs(out.rho), gap}),
                                    config_.linear_tolerance, 1e-2);
      if (gap > 0.0) {
        for (std::size_t i = 0; i < n; ++i) y[i] = out.x[i] / gap;
      } else {
        std::fill(y.begin(), y.end(), 0.0);
      }
      try {
        ShiftedOperator shifted(op_, sigma, basis);
        solve_shifted(shifted, symmetric_, out.x, y, eta, config_.max_linear_iterations);
      } catch (const SolverError& e) {
        if (sigma > safe) {
          sigma = safe;
          admit *= 0.1;
          continue;
        }
        out.failure = std::string("inner solve failed: ") + e.what();
        out.shift = sigma;
        return out;
      }
      x_prev.swap(out.x);
      ax_prev.swap(out.ax);
      out.x = y;
      out.ax.assign(n, 0.0);
      orthonormalize(out.x, basis);
      evaluate(out, basis);

      if (out.rho < sigma && sigma > safe) {
        sigma = safe;
        admit *= 0.1;
        continue;
      }
      if (!symmetric_ && it >= 10) {
        complex_hits = complex_ritz(x_prev, ax_prev, out) ? complex_hits + 1 : 0;
        if (complex_hits >= 5) {
          throw UnsupportedSpectrumError("non-symmetric operator has a complex pair of smallest eigenvalues",
                                         out.residual);
        }
      }
      if (adaptive) {
        if (const auto cw = collatz_wielandt(out.x, out.ax)) {
          const double bound = *cw - 0.01 * std::max(out.rho - *cw, 0.0) - 1e-12 * scale_;
          safe = std::max(safe, bound);
        }
        double next = std::max(sigma, safe);
        if (out.residual < admit * (out.rho - sigma)) {
          const double candidate = out.rho - 2.0 * out.residual;
          if (candidate > next) {
            next = candidate;
            out.used_heuristic_shift = true;
          }
        }
        sigma = next;
      }
    }
    out.iterations = config_.max_iterations;
    out.converged = out.residual <= config_.tolerance;
    out.shift = sigma;
    if (!out.converged) {
      out.failure = residual_message("shift-invert iteration did not converge", config_.max_iterations, out.residual);
    }
    return out;
  }

 private:
  void evaluate(PairRun& out, const std::vector<Vec>& basis) const {
    op_.apply(out.x, out.ax);
    out.rho = parallel::dot(out.x, out.ax);
    Vec r = out.ax;
    parallel::axpy(-out.rho, out.x, r);
    if (!symmetric_) project_out(basis, r);
    out.residual = parallel::norm2(r);
  }

  // Rayleigh-Ritz on span{x_prev, x}: true when the 2x2 projection has a
  // complex pair of eigenvalues.
  bool complex_ritz(const Vec& x_prev, const Vec& ax_prev, const PairRun& cur) const {
    const double c = parallel::dot(x_prev, cur.x);
    Vec q2 = cur.x;
    Vec aq2 = cur.ax;
    parallel::axpy(-c, x_prev, q2);
    parallel::axpy(-c, ax_prev, aq2);
    const double norm = parallel::norm2(q2);
    if (norm < 1e-8) return false;
    parallel::scale(1.0 / norm, q2);
    parallel::scale(1.0 / norm, aq2);
    const double h11 = parallel::dot(x_prev, ax_prev);
    const double h12 = parallel::dot(x_prev, aq2);
    const double h21 = parallel::dot(q2, ax_prev);
    const double h22 = parallel::dot(q2, aq2);
    const double half = 0.5 * (h11 - h22);
    const double disc = half * half + h12 * h21;
    const double level = 1e-6 * std::max({1.0, std::abs(h11), std::abs(h22)});
    return disc < -level * level;
  }

  const SparseOperator& op_;
  const SolverConfig& config_;
  bool symmetric_;
  bool z_matrix_;
  double scale_;

 public:
  bool z_matrix() const { return z_matrix_; }
};

}  // namespace

void validate(const SolverConfig& config) {
  if (!(config.tolerance > 0.0 && config.tolerance < 1.0)) throw ConfigError("solver tolerance must lie in (0, 1)");
  if (!(config.linear_tolerance > 0.0 && config.linear_tolerance < 1.0)) {
    throw ConfigError("linear solver tolerance must lie in (0, 1)");
  }
  if (config.max_iterations < 1 || config.max_linear_iterations < 1) {
    throw ConfigError("solver iteration caps must be at least 1");
  }
  if (config.shift && !std::isfinite(*config.shift)) throw ConfigError("solver shift must be finite");
}

ScalarField solve_linear(const SparseOperator& op, const ScalarField& rhs, const SolverConfig& config) {
  validate(config);
  check_field(rhs, op.mask());
  check_finite(rhs, "right-hand side");
  const std::vector<Vec> none;
  const ShiftedOperator shifted(op, config.shift.value_or(0.0), none);
  Vec x(rhs.size(), 0.0);
  solve_shifted(shifted, op.symmetric(), rhs.data(), x, config.linear_tolerance, config.max_linear_iterations);
  return ScalarField(std::move(x));
}

EigenResult smallest_eigenpairs(const SparseOperator& op, int k, const SolverConfig& config) {
  validate(config);
  const std::size_t n = op.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw ConfigError("eigenpair count must lie in [1, interior nodes]");

  const PowerIteration power(op, config);
  const bool symmetric = op.symmetric();
  const double start_shift = config.shift.value_or(op.matrix().gershgorin_lower_bound() - 1e-3 * power.scale());
  const double cell = op.mask().grid().cell_volume();

  EigenResult result;
  result.shift = start_shift;
  std::vector<Vec> basis;
  std::vector<Vec> images;
  double shift = start_shift;

  for (int j = 0; j < k; ++j) {
    const bool adaptive = !config.shift && j == 0 && power.z_matrix();
    PairRun run = power.run(j, basis, shift, adaptive, adaptive);
    if (run.converged && adaptive && run.used_heuristic_shift && !single_signed(run.x)) {
      // A shift past the middle of the first gap converges to the wrong
      // eigenvalue; the ground state of a Z-matrix has one sign.
      run = power.run(j, basis, start_shift, true, false);
    }
    if (j == 0) {
      result.shift = run.shift;
      shift = run.shift;
    }
    if (!run.converged) {
      std::ostringstream s;
      s << "eigenpair " << j << ": " << run.failure;
      result.failure = s.str();
      break;
    }

    Vec u;
    if (symmetric) {
      u = run.x;
    } else {
      // Eigenvector of the triangular factor T = Q^T A Q for its last diagonal entry.
      const std::size_t m = basis.size();
      std::vector<double> z(m + 1, 0.0);
      z[m] = 1.0;
      for (std::size_t i = m; i-- > 0;) {
        double s = parallel::dot(basis[i], run.ax);
        for (std::size_t l = i + 1; l < m; ++l) s += parallel::dot(basis[i], images[l]) * z[l];
        const double d = parallel::dot(basis[i], images[i]) - run.rho;
        z[i] = std::abs(d) > 1e-14 * power.scale() ? -s / d : 0.0;
      }
      u = run.x;
      for (std::size_t i = 0; i < m; ++i) parallel::axpy(z[i], basis[i], u);
    }
    basis.push_back(run.x);
    images.push_back(run.ax);

    double sum = 0.0;
    for (double v : u) sum += v;
    const double norm = parallel::norm2(u) * std::sqrt(cell);
    parallel::scale((sum < 0.0 ? -1.0 : 1.0) / norm, u);

    EigenPair pair;
    pair.lambda = run.rho;
    pair.u = ScalarField(std::move(u));
    pair.iterations = run.iterations;
    pair.residual = weak_residual(op, pair);
    result.pairs.push_back(std::move(pair));
  }

  result.converged = result.failure.empty();
  std::stable_sort(result.pairs.begin(), result.pairs.end(),
                   [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  return result;
}

double weak_residual(const SparseOperator& op, const EigenPair& pair) {
  return weak_residual(op, pair.lambda, pair.u);
}

}  // namespace rhlab
