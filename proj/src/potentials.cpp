#include "rhlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNodeTol = 1e-9;

bool in_closed_cell(const Point& x, const Point& node, const Grid& grid) {
  for (int d = 0; d < grid.dim; ++d) {
    if (std::abs(x[d] - node[d]) > 0.5 * grid.spacing[d] * (1.0 + 1e-12)) return false;
  }
  return true;
}

void check_not_on_node(const quadrature::Singularity& s, const Point& node, const Grid& grid) {
  if (distance(s.center, node, grid.dim) < kNodeTol * grid.max_spacing()) {
    throw ConfigError("potential singularity coincides with a grid node; offset its center by half a cell");
  }
}

// The singularity of the dual cell around node, if any. Two distinct singular
// centers in one cell are rejected since the cell quadrature handles one.
std::optional<quadrature::Singularity> cell_singularity(const std::vector<quadrature::Singularity>& all,
                                                        const Point& node, const Grid& grid) {
  std::optional<quadrature::Singularity> found;
  for (const auto& s : all) {
    if (!in_closed_cell(s.center, node, grid)) continue;
    check_not_on_node(s, node, grid);
    if (found && distance(found->center, s.center, grid.dim) > 0.0) {
      throw ConfigError("two potential singularities share one grid cell; refine the grid");
    }
    if (!found || s.exponent > found->exponent) found = s;
  }
  return found;
}

// V at base + offset; power laws centered exactly at base use |offset| so
// points extremely close to the center keep full precision.
double evaluate_offset(const PotentialSpec& spec, const Point& base, const Point& offset, int dim) {
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) {
                          if (p.amplitude == 0.0) return 0.0;
                          double d2 = 0.0;
                          for (int d = 0; d < dim; ++d) {
                            const double e = p.center == base ? offset[d] : base[d] + offset[d] - p.center[d];
                            d2 += e * e;
                          }
                          return p.amplitude * std::pow(std::sqrt(d2), -p.exponent);
                        },
                        [](const Constant& c) { return c.value; },
                        [&](const BallWell& w) {
                          Point x = base;
                          for (int d = 0; d < dim; ++d) x[d] += offset[d];
                          return distance(x, w.center, dim) < w.radius ? w.depth : 0.0;
                        },
                        [&](const PotentialSum& s) {
                          double v = 0.0;
                          for (const auto& t : s.terms) v += evaluate_offset(t, base, offset, dim);
                          return v;
                        },
                    },
                    spec.term());
}

// Integral over the dual cell of node of V (power = 0) or of |V|^power.
double cell_integral(const PotentialSpec& spec, double power, const Grid& grid, const Point& node,
                     const std::optional<quadrature::Singularity>& s) {
  Point lower{0.0, 0.0, 0.0};
  Point upper{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim; ++d) {
    lower[d] = node[d] - 0.5 * grid.spacing[d];
    upper[d] = node[d] + 0.5 * grid.spacing[d];
  }
  const int dim = grid.dim;
  auto transform = [power](double v) { return power == 0.0 ? v : std::pow(std::abs(v), power); };
  if (!s) {
    return quadrature::box_integral([&](const Point& x) { return transform(evaluate(spec, x, dim)); }, dim, lower,
                                    upper);
  }
  const Point base = s->center;
  quadrature::Singularity sing = *s;
  if (power != 0.0) sing.exponent *= power;
  return quadrature::singular_box_integral(
      [&](const Point& offset) { return transform(evaluate_offset(spec, base, offset, dim)); }, dim, lower, upper,
      sing);
}

void validate_terms(const PotentialSpec& spec, bool allow_inverse_square) {
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (!std::isfinite(p.amplitude)) throw ConfigError("power-law amplitude must be finite");
                   const bool ok = p.exponent > 0.0 && (p.exponent < 2.0 || (allow_inverse_square && p.exponent == 2.0));
                   if (!ok) throw ConfigError(allow_inverse_square ? "power-law exponent must lie in (0, 2]"
                                                                   : "power-law exponent must lie in (0, 2)");
                 },
                 [](const Constant& c) {
                   if (!std::isfinite(c.value)) throw ConfigError("constant potential must be finite");
                 },
                 [](const BallWell& w) {
                   if (!std::isfinite(w.depth)) throw ConfigError("ball-well depth must be finite");
                   if (!(w.radius > 0.0)) throw ConfigError("ball-well radius must be positive");
                 },
                 [&](const PotentialSum& s) {
                   if (s.terms.empty()) throw ConfigError("potential sum must have at least one term");
                   for (const auto& t : s.terms) validate_terms(t, allow_inverse_square);
                 },
             },
             spec.term());
}

}  // namespace

void validate(const PotentialSpec& spec) { validate_terms(spec, false); }

void validate_weight(const PotentialSpec& spec) { validate_terms(spec, true); }

double evaluate(const PotentialSpec& spec, const Point& x, int dim) {
  return std::visit(Overloaded{
                        [&](const PowerLaw& p) {
                          if (p.amplitude == 0.0) return 0.0;
                          return p.amplitude * std::pow(distance(x, p.center, dim), -p.exponent);
                        },
                        [](const Constant& c) { return c.value; },
                        [&](const BallWell& w) { return distance(x, w.center, dim) < w.radius ? w.depth : 0.0; },
                        [&](const PotentialSum& s) {
                          double v = 0.0;
                          for (const auto& t : s.terms) v += evaluate(t, x, dim);
                          return v;
                        },
                    },
                    spec.term());
}

std::vector<quadrature::Singularity> singularities(const PotentialSpec& spec) {
  std::vector<quadrature::Singularity> out;
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   if (p.amplitude != 0.0) out.push_back({p.center, p.exponent});
                 },
                 [](const Constant&) {},
                 [](const BallWell&) {},
                 [&](const PotentialSum& s) {
                   for (const auto& t : s.terms) {
                     auto inner = singularities(t);
                     out.insert(out.end(), inner.begin(), inner.end());
                   }
                 },
             },
             spec.term());
  return out;
}

PotentialSpec scaled(const PotentialSpec& spec, double factor) {
  return std::visit(Overloaded{
                        [&](PowerLaw p) -> PotentialSpec {
                          p.amplitude *= factor;
                          return p;
                        },
                        [&](Constant c) -> PotentialSpec {
                          c.value *= factor;
                          return c;
                        },
                        [&](BallWell w) -> PotentialSpec {
                          w.depth *= factor;
                          return w;
                        },
                        [&](const PotentialSum& s) -> PotentialSpec {
                          PotentialSum out;
                          for (const auto& t : s.terms) out.terms.push_back(scaled(t, factor));
                          return out;
                        },
                    },
                    spec.term());
}

bool is_nonnegative(const PotentialSpec& spec) {
  return std::visit(Overloaded{
                        [](const PowerLaw& p) { return p.amplitude >= 0.0; },
                        [](const Constant& c) { return c.value >= 0.0; },
                        [](const BallWell& w) { return w.depth >= 0.0; },
                        [](const PotentialSum& s) {
                          return std::all_of(s.terms.begin(), s.terms.end(),
                                             [](const PotentialSpec& t) { return is_nonnegative(t); });
                        },
                    },
                    spec.term());
}

std::string describe(const PotentialSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const PowerLaw& p) {
                   out << "power_law(amplitude=" << p.amplitude << ", exponent=" << p.exponent << ", center=("
                       << p.center[0] << "," << p.center[1] << "," << p.center[2] << "))";
                 },
                 [&](const Constant& c) { out << "constant(" << c.value << ")"; },
                 [&](const BallWell& w) {
                   out << "ball_well(depth=" << w.depth << ", radius=" << w.radius << ", center=(" << w.center[0]
                       << "," << w.center[1] << "," << w.center[2] << "))";
                 },
                 [&](const PotentialSum& s) {
                   out << "sum(";
                   for (std::size_t i = 0; i < s.terms.size(); ++i) out << (i ? ", " : "") << describe(s.terms[i]);
                   out << ")";
                 },
             },
             spec.term());
  return out.str();
}

PotentialSpec offset_singular_centers(const PotentialSpec& spec, const Grid& grid) {
  return std::visit(Overloaded{
                        [&](PowerLaw p) -> PotentialSpec {
                          bool on_node = true;
                          for (int d = 0; d < grid.dim; ++d) {
                            const double k = std::round((p.center[d] - grid.origin[d]) / grid.spacing[d]);
                            const double node = grid.origin[d] + k * grid.spacing[d];
                            if (std::abs(p.center[d] - node) > kNodeTol * grid.spacing[d]) on_node = false;
                          }
                          if (on_node) {
                            for (int d = 0; d < grid.dim; ++d) p.center[d] += 0.5 * grid.spacing[d];
                          }
                          return p;
                        },
                        [](const Constant& c) -> PotentialSpec { return c; },
                        [](const BallWell& w) -> PotentialSpec { return w; },
                        [&](const PotentialSum& s) -> PotentialSpec {
                          PotentialSum out;
                          for (const auto& t : s.terms) out.terms.push_back(offset_singular_centers(t, grid));
                          return out;
                        },
                    },
                    spec.term());
}

double cell_average(const PotentialSpec& spec, const Grid& grid, const Point& node) {
  const auto s = cell_singularity(singularities(spec), node, grid);
  return cell_integral(spec, 0.0, grid, node, s) / grid.cell_volume();
}

ScalarField sample_potential(const PotentialSpec& spec, const DomainMask& mask) {
  const Grid& grid = mask.grid();
  const auto sing = singularities(spec);
  ScalarField out(mask.interior_count(), 0.0);
  for (std::size_t i = 0; i < mask.interior_count(); ++i) {
    const Point x = mask.coordinate(i);
    const auto s = cell_singularity(sing, x, grid);
    out[i] = s ? cell_average(spec, grid, x) : evaluate(spec, x, grid.dim);
    if (!std::isfinite(out[i])) throw ConfigError("potential sample is not finite");
  }
  return out;
}

MCParams resolve(const MCParams& params, const DomainMask& mask) {
  const Grid& grid = mask.grid();
  if (!(params.alpha > 0.0 && params.alpha <= 2.0)) throw HypothesisError("Morrey-Campanato alpha must lie in (0, 2]");
  if (!(params.r >= 1.0)) throw HypothesisError("Morrey-Campanato exponent r must be at least 1");
  if (params.r < 2.0 / params.alpha * (1.0 - 1e-12)) {
    throw HypothesisError("Morrey-Campanato exponent r must satisfy r >= 2/alpha");
  }
  if (params.radii_per_octave < 1) throw ConfigError("radii_per_octave must be at least 1");
  if (params.center_stride < 0) throw ConfigError("center_stride must be non-negative");
  MCParams out = params;
  const double h = grid.mean_spacing();
  if (out.rho_min <= 0.0) out.rho_min = 2.0 * h;
  if (out.rho_max <= 0.0) out.rho_max = mask.diameter();
  if (out.center_stride == 0) out.center_stride = std::max(1, (grid.nodes_per_axis - 1 + 9) / 10);
  if (!(out.rho_max > out.rho_min)) throw ConfigError("empty Morrey-Campanato radius range");
  return out;
}

namespace {

std::vector<double> radius_lattice(const MCParams& p, double h) {
  const double m = p.radii_per_octave;
  const long first = static_cast<long>(std::floor(m * std::log2(p.rho_min / h))) - 1;
  std::vector<double> radii;
  for (long j = first;; ++j) {
    const double rho = h * std::exp2(static_cast<double>(j) / m);
    if (rho > p.rho_max * (1.0 + 1e-12)) break;
    if (rho > p.rho_min * (1.0 + 1e-12)) radii.push_back(rho);
  }
  return radii;
}

struct CenterBest {
  double value = -1.0;
  std::size_t radius = 0;
};

}  // namespace

MCNormEstimate mc_norm(const PotentialSpec& spec, const MCParams& params, const DomainMask& mask) {
  const MCParams p = resolve(params, mask);
  const Grid& grid = mask.grid();
  const int dim = grid.dim;
  const double h = grid.mean_spacing();
  const auto sing = singularities(spec);
  for (const auto& s : sing) {
    if (!(s.exponent * p.r < dim)) {
      throw HypothesisError("|V|^r is not locally integrable (r >= n/alpha at a singular center)");
    }
  }

  // |V|^r at interior nodes; zero extension elsewhere.
  const std::size_t count = mask.interior_count();
  std::vector<double> density(count, 0.0);
  parallel::for_blocks(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point x = mask.coordinate(i);
      const auto s = cell_singularity(sing, x, grid);
      if (s) {
        density[i] = cell_integral(spec, p.r, grid, x, s) / grid.cell_volume();
      } else {
        density[i] = std::pow(std::abs(evaluate(spec, x, dim)), p.r);
      }
    }
  });

  std::vector<Point> centers;
  std::size_t singular_centers = 0;
  for (const auto& s : sing) {
    centers.push_back(s.center);
    ++singular_centers;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const NodeIndex idx = grid.multi_index(mask.node_of(i));
    bool take = true;
    for (int d = 0; d < dim; ++d) take = take && idx[d] % p.center_stride == 0;
    if (take) centers.push_back(mask.coordinate(i));
  }
  const auto radii = radius_lattice(p, h);
  if (centers.empty() || radii.empty()) throw ConfigError("empty Morrey-Campanato search set");

  const std::size_t nr = radii.size();
  std::vector<double> full_threshold(nr);
  for (std::size_t j = 0; j < nr; ++j) full_threshold[j] = (radii[j] - 0.5 * h) * (radii[j] - 0.5 * h);
  const double scale_exponent = p.alpha - dim / p.r;
  const double cell = grid.cell_volume();

  std::vector<CenterBest> best(centers.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallel::workers())
  for (long long c = 0; c < static_cast<long long>(centers.size()); ++c) {
    const Point& center = centers[static_cast<std::size_t>(c)];
    std::vector<double> full(nr + 1, 0.0);
    std::vector<double> partial(nr, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double v = density[i];
      if (v == 0.0) continue;
      const Point x = mask.coordinate(i);
      double d2 = 0.0;
      for (int d = 0; d < dim; ++d) d2 += (x[d] - center[d]) * (x[d] - center[d]);
      // First radius whose ball holds the whole cell.
      const auto jf = static_cast<std::size_t>(
          std::lower_bound(full_threshold.begin(), full_threshold.end(), d2) - full_threshold.begin());
      full[jf] += v;
      const double dist = std::sqrt(d2);
      for (std::size_t j = jf; j-- > 0;) {
        const double w = (radii[j] - dist) / h + 0.5;
        if (w <= 0.0) break;
        partial[j] += w * v;
      }
    }
    CenterBest b;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < nr; ++j) {
      cumulative += full[j];
      const double integral = (cumulative + partial[j]) * cell;
      const double value = std::pow(radii[j], scale_exponent) * std::pow(integral, 1.0 / p.r);
      if (value > b.value) {
        b.value = value;
        b.radius = j;
      }
    }
    best[static_cast<std::size_t>(c)] = b;
  }

  MCNormEstimate out;
  out.rho_min = p.rho_min;
  out.rho_max = p.rho_max;
  out.center_stride = p.center_stride;
  out.centers_scanned = centers.size();
  out.radii_scanned = nr;
  double top = -1.0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (best[c].value > top) {
      top = best[c].value;
      out.center = centers[c];
      out.radius = radii[best[c].radius];
      out.center_is_singular = c < singular_centers;
    }
  }
  out.value = std::max(0.0, top);
  return out;
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

std::optional<double> mc_norm_analytic(const PotentialSpec& spec, double alpha, double r, int n) {
  const auto* p = std::get_if<PowerLaw>(&spec.term());
  if (p == nullptr || std::abs(p->exponent - alpha) > 1e-12) return std::nullopt;
  if (!(n - alpha * r > 0.0)) throw HypothesisError("divergent ball integral: r >= n/alpha");
  return std::abs(p->amplitude) * std::pow(unit_sphere_area(n) / (n - alpha * r), 1.0 / r);
}

}  // namespace rhlab
