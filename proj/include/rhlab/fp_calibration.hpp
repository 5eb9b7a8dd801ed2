#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhlab/field.hpp"
#include "rhlab/mesh.hpp"
#include "rhlab/potentials.hpp"

namespace rhlab {

/// Fixed test functions for the Fefferman-Phong and Sobolev quotients.
///
/// Member i of a bank depends only on (mask, seed, i), so a bank of size N is
/// a prefix of every larger bank with the same seed. The sequence starts with
/// four Gaussian bumps centered in the bounding box (decreasing concentration),
/// then the sine products of modes (1,..,1) and (2,1,..,1), then Gaussian bumps
/// with pseudo-random centers and widths. Bumps are multiplied by the lowest
/// sine mode of the bounding box so they vanish on its boundary.
struct TestBank {
  DomainRef mask;
  std::uint64_t seed = 0;
  std::vector<ScalarField> fields;
  std::vector<std::string> labels;

  std::size_t size() const { return fields.size(); }
};

TestBank make_test_bank(const DomainRef& mask, std::size_t size, std::uint64_t seed);

/// A nonnegative weight v with its nodal samples and its L^{2,r} norm.
struct FpWeight {
  PotentialSpec spec;
  double r = 0.0;
  /// Point values, cell averages on cells that hold a singular center.
  ScalarField samples;
  MCNormEstimate norm;
};

/// Throws HypothesisError for r <= 1 and ConfigError when v can be negative.
/// The search controls of `search` are used with alpha = 2 and the given r.
FpWeight make_fp_weight(const PotentialSpec& v, double r, const DomainMask& mask, const MCParams& search = {});

/// sum_i g_i^2 v_i h^n / ||grad g||^2. Throws DegenerateInputError when the
/// discrete gradient of g vanishes.
double weighted_dirichlet_quotient(const ScalarField& g, const ScalarField& weight, const DomainMask& mask);

/// [int g^2 v] / (||v||_{L^{2,r}} int |grad g|^2); zero when v vanishes.
double fp_ratio(const ScalarField& g, const FpWeight& weight, const DomainMask& mask);
double fp_ratio(const ScalarField& g, const PotentialSpec& v, double r, const DomainMask& mask);

/// Hardy quotient int g^2 / |x - c|^2 / int |grad g|^2, bounded by 4 / (n - 2)^2.
double hardy_quotient(const ScalarField& g, const Point& center, const DomainMask& mask);

struct CnEstimate {
  double value = 0.0;
  std::size_t test_index = 0;
  std::size_t potential_index = 0;
  std::string test_label;
  std::string potential;
  double weight_norm = 0.0;
  double r = 0.0;
  int n = 0;
  std::size_t bank_size = 0;
  std::uint64_t bank_seed = 0;
  /// True when every ratio vanished, so the estimate carries no information.
  bool degenerate = false;
};

/// Maximum fp_ratio over bank x weights, ties to the first index (test-major).
CnEstimate estimate_cn(const TestBank& bank, const std::vector<FpWeight>& weights);

/// ||w||_{2 omega}^2 / ||grad w||_2^2 with omega = n / (n - 2). Requires n >= 3.
double gns_ratio(const ScalarField& w, const DomainMask& mask);

/// Sharp constant S_n of ||w||_{2n/(n-2)}^2 <= S_n ||grad w||_2^2 on R^n.
double sharp_sobolev_constant(int n);

}  // namespace rhlab
