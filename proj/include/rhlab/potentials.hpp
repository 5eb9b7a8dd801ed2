#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"
#include "rhlab/quadrature.hpp"

namespace rhlab {

/// amplitude * |x - center|^(-exponent); 0 < exponent < 2.
struct PowerLaw {
  double amplitude = 1.0;
  Point center{};
  double exponent = 1.0;
};

struct Constant {
  double value = 0.0;
};

/// depth inside the open ball, zero outside.
struct BallWell {
  double depth = 1.0;
  Point center{};
  double radius = 1.0;
};

class PotentialSpec;

struct PotentialSum {
  std::vector<PotentialSpec> terms;
};

class PotentialSpec {
 public:
  using Variant = std::variant<PowerLaw, Constant, BallWell, PotentialSum>;

  PotentialSpec() : term_(Constant{}) {}
  PotentialSpec(PowerLaw p) : term_(p) {}
  PotentialSpec(Constant c) : term_(c) {}
  PotentialSpec(BallWell w) : term_(w) {}
  PotentialSpec(PotentialSum s) : term_(std::move(s)) {}

  const Variant& term() const { return term_; }

 private:
  Variant term_;
};

/// Throws ConfigError unless every term satisfies its invariants.
void validate(const PotentialSpec& spec);
/// Same checks for a weight of the Fefferman-Phong inequality, which also
/// admits the inverse-square power law.
void validate_weight(const PotentialSpec& spec);
/// Pointwise value; infinite at a power-law center.
double evaluate(const PotentialSpec& spec, const Point& x, int dim);
std::vector<quadrature::Singularity> singularities(const PotentialSpec& spec);
/// c * V.
PotentialSpec scaled(const PotentialSpec& spec, double factor);
/// True if V >= 0 everywhere.
bool is_nonnegative(const PotentialSpec& spec);
std::string describe(const PotentialSpec& spec);

/// Moves every power-law center that coincides with a grid node by half a
/// cell along each axis so no node samples a singularity.
PotentialSpec offset_singular_centers(const PotentialSpec& spec, const Grid& grid);

/// Cell average of V over the dual cell of an interior node.
double cell_average(const PotentialSpec& spec, const Grid& grid, const Point& node);

/// Nodal samples of V. Nodes whose dual cell contains a singular center get
/// the cell average of V instead of a point value. Throws ConfigError when a
/// node sits on a singularity.
ScalarField sample_potential(const PotentialSpec& spec, const DomainMask& mask);

/// Search controls for the Morrey-Campanato supremum
///   sup_{x, rho} rho^(alpha - n/r) (int_{B_rho(x)} |V|^r)^(1/r).
///
/// Radii lie on the lattice h * 2^(j / radii_per_octave) restricted to
/// (rho_min, rho_max]; a lattice anchored at h makes a larger range a superset
/// of a smaller one. Zero for rho_min, rho_max or center_stride selects the
/// defaults 2h, diam(domain) and ceil((nodes - 1) / 10).
struct MCParams {
  double alpha = 1.0;
  double r = 2.5;
  double rho_min = 0.0;
  double rho_max = 0.0;
  int center_stride = 0;
  int radii_per_octave = 4;
};

struct MCNormEstimate {
  double value = 0.0;
  Point center{};
  double radius = 0.0;
  bool center_is_singular = false;
  double rho_min = 0.0;
  double rho_max = 0.0;
  int center_stride = 0;
  std::size_t centers_scanned = 0;
  std::size_t radii_scanned = 0;
};

/// Fills in the defaults of params for this mask and validates the class
/// range: alpha in (0, 2], r >= 1 and r >= 2/alpha.
MCParams resolve(const MCParams& params, const DomainMask& mask);

/// Discrete Morrey-Campanato norm of V extended by zero outside the domain.
/// Ball integrals use nodal quadrature with fractional boundary weights and
/// the cell average of |V|^r on cells that contain a singular center. Centers
/// are the declared singular centers followed by every stride-th interior node;
/// ties go to the first (center, radius) pair in that order.
MCNormEstimate mc_norm(const PotentialSpec& spec, const MCParams& params, const DomainMask& mask);

/// Surface area of the unit sphere in R^n.
double unit_sphere_area(int n);

/// Closed form |a| (sigma_{n-1} / (n - alpha r))^(1/r) for a single power law
/// whose exponent equals alpha; nullopt for any other potential. Throws
/// HypothesisError when r >= n/alpha.
std::optional<double> mc_norm_analytic(const PotentialSpec& spec, double alpha, double r, int n);

}  // namespace rhlab
