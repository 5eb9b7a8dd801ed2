#include "rhlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "rhlab/errors.hpp"

namespace rhlab {

namespace {

constexpr double kGeomTol = 1e-12;

}  // namespace

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

std::size_t Grid::node_count() const {
  std::size_t count = 1;
  for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(nodes_per_axis);
  return count;
}

std::size_t Grid::linear_index(const NodeIndex& idx) const {
  std::size_t linear = 0;
  for (int d = 0; d < dim; ++d) linear = linear * static_cast<std::size_t>(nodes_per_axis) + idx[d];
  return linear;
}

NodeIndex Grid::multi_index(std::size_t linear) const {
  NodeIndex idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(nodes_per_axis);
  for (int d = dim - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(linear % n);
    linear /= n;
  }
  return idx;
}

Point Grid::coordinate(const NodeIndex& idx) const {
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) x[d] = origin[d] + spacing[d] * idx[d];
  return x;
}

bool Grid::on_boundary(const NodeIndex& idx) const {
  for (int d = 0; d < dim; ++d) {
    if (idx[d] == 0 || idx[d] == nodes_per_axis - 1) return true;
  }
  return false;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= spacing[d];
  return v;
}

double Grid::max_spacing() const {
  double h = 0.0;
  for (int d = 0; d < dim; ++d) h = std::max(h, spacing[d]);
  return h;
}

double Grid::mean_spacing() const { return std::pow(cell_volume(), 1.0 / dim); }

Grid build_grid(int dim, std::span<const double> extents, int nodes_per_axis,
                std::span<const double> origin) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  if (extents.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError("grid needs " + std::to_string(dim) + " extents, got " + std::to_string(extents.size()));
  }
  if (!origin.empty() && origin.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError("grid origin has " + std::to_string(origin.size()) + " coordinates, expected " +
                      std::to_string(dim));
  }
  if (nodes_per_axis < 3) throw ConfigError("grid needs at least 3 nodes per axis");
  Grid grid;
  grid.dim = dim;
  grid.nodes_per_axis = nodes_per_axis;
  for (int d = 0; d < dim; ++d) {
    if (!(extents[d] > 0.0) || !std::isfinite(extents[d])) throw ConfigError("grid extents must be positive");
    grid.extent[d] = extents[d];
    grid.origin[d] = origin.empty() ? 0.0 : origin[d];
    grid.spacing[d] = extents[d] / (nodes_per_axis - 1);
  }
  return grid;
}

DomainShape DomainShape::box(const Point& lower, const Point& upper) {
  DomainShape s;
  s.kind = Kind::box;
  s.lower = lower;
  s.upper = upper;
  return s;
}

DomainShape DomainShape::box(const Grid& grid) {
  Point upper{0.0, 0.0, 0.0};
  for (int d = 0; d < grid.dim; ++d) upper[d] = grid.origin[d] + grid.extent[d];
  return box(grid.origin, upper);
}

DomainShape DomainShape::ball(const Point& center, double radius) {
  DomainShape s;
  s.kind = Kind::ball;
  s.center = center;
  s.radius = radius;
  return s;
}

bool DomainShape::strictly_contains(const Point& x, int dim) const {
  if (kind == Kind::ball) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) r2 += (x[d] - center[d]) * (x[d] - center[d]);
    return r2 < radius * radius * (1.0 - kGeomTol);
  }
  for (int d = 0; d < dim; ++d) {
    const double tol = kGeomTol * std::max(1.0, upper[d] - lower[d]);
    if (!(x[d] > lower[d] + tol && x[d] < upper[d] - tol)) return false;
  }
  return true;
}

double DomainShape::diameter(int dim) const {
  if (kind == Kind::ball) return 2.0 * radius;
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (upper[d] - lower[d]) * (upper[d] - lower[d]);
  return std::sqrt(s);
}

DomainMask::DomainMask(const Grid& grid, const DomainShape& shape)
    : grid_(grid), shape_(shape), interior_of_node_(grid.node_count(), -1) {
  const std::size_t total = grid.node_count();
  for (std::size_t node = 0; node < total; ++node) {
    const NodeIndex idx = grid.multi_index(node);
    if (grid.on_boundary(idx)) continue;
    if (!shape.strictly_contains(grid.coordinate(idx), grid.dim)) continue;
    interior_of_node_[node] = static_cast<std::int32_t>(interior_nodes_.size());
    interior_nodes_.push_back(node);
  }
}

namespace {

void check_fits(const Grid& grid, const DomainShape& shape) {
  for (int d = 0; d < grid.dim; ++d) {
    const double lo = grid.origin[d];
    const double hi = grid.origin[d] + grid.extent[d];
    const double tol = kGeomTol * grid.extent[d];
    double s_lo = shape.lower[d];
    double s_hi = shape.upper[d];
    if (shape.kind == DomainShape::Kind::ball) {
      s_lo = shape.center[d] - shape.radius;
      s_hi = shape.center[d] + shape.radius;
    }
    if (s_lo < lo - tol || s_hi > hi + tol) throw ConfigError("domain shape does not fit inside the grid extents");
  }
}

bool is_connected(const DomainMask& mask) {
  const Grid& grid = mask.grid();
  std::vector<char> seen(mask.interior_count(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const NodeIndex idx = grid.multi_index(mask.node_of(k));
    for (int d = 0; d < grid.dim; ++d) {
      for (int step : {-1, 1}) {
        NodeIndex nb = idx;
        nb[d] += step;
        if (nb[d] < 0 || nb[d] >= grid.nodes_per_axis) continue;
        const auto j = mask.interior_index(grid.linear_index(nb));
        if (j < 0 || seen[static_cast<std::size_t>(j)]) continue;
        seen[static_cast<std::size_t>(j)] = 1;
        ++reached;
        queue.push_back(static_cast<std::size_t>(j));
      }
    }
  }
  return reached == mask.interior_count();
}

}  // namespace

DomainRef build_domain(const Grid& grid, const DomainShape& shape) {
  if (shape.kind == DomainShape::Kind::ball && !(shape.radius > 0.0)) {
    throw DegenerateInputError("ball domain has non-positive radius");
  }
  check_fits(grid, shape);
  auto mask = std::make_shared<DomainMask>(grid, shape);
  if (mask->interior_count() == 0) throw DegenerateInputError("domain has no interior nodes");
  if (!is_connected(*mask)) throw ConfigError("domain mask is disconnected");
  return mask;
}

}  // namespace rhlab
