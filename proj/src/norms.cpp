#include "rhlab/norms.hpp"

#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

double lp_norm(const ScalarField& u, double p, const Grid& grid) {
  if (!(p > 0.0)) throw ConfigError("norm exponent p must be positive");
  double peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) peak = std::max(peak, std::abs(u[i]));
  if (std::isinf(p) || peak == 0.0) return peak;
  // Scaling by the peak keeps |u|^p representable for large p.
  const double sum = parallel::blocked_sum(u.size(), [&](std::size_t i) { return std::pow(std::abs(u[i]) / peak, p); });
  return peak * std::pow(sum * grid.cell_volume(), 1.0 / p);
}

double h1_seminorm(const ScalarField& u, const DomainMask& mask) {
  check_field(u, mask);
  const Grid& grid = mask.grid();
  const double sum = parallel::blocked_sum(u.size(), [&](std::size_t i) {
    const NodeIndex idx = grid.multi_index(mask.node_of(i));
    double s = 0.0;
    for (int d = 0; d < grid.dim; ++d) {
      for (int side : {-1, 1}) {
        NodeIndex nb = idx;
        nb[d] += side;
        const auto k = mask.interior_index(grid.linear_index(nb));
        // Interior faces are counted once, from the lower node.
        if (k >= 0 && side < 0) continue;
        const double q = (u[i] - (k >= 0 ? u[static_cast<std::size_t>(k)] : 0.0)) / grid.spacing[d];
        s += q * q;
      }
    }
    return s;
  });
  return std::sqrt(sum * grid.cell_volume());
}

SignedParts signed_parts(const ScalarField& u) {
  SignedParts out{ScalarField(u.size(), 0.0), ScalarField(u.size(), 0.0)};
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0) {
      out.positive[i] = u[i];
    } else if (u[i] < 0.0) {
      out.negative[i] = -u[i];
    }
  }
  return out;
}

}  // namespace rhlab
