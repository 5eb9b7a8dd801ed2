#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace rhlab {

/// A point of R^n, n <= 3; unused trailing coordinates are zero.
using Point = std::array<double, 3>;
/// Multi-index of a grid node; unused trailing entries are zero.
using NodeIndex = std::array<int, 3>;

double distance(const Point& a, const Point& b, int dim);

/// Uniform tensor grid on an axis-aligned box. Nodes are ordered
/// lexicographically with the last axis varying fastest.
struct Grid {
  int dim = 3;
  int nodes_per_axis = 0;
  Point origin{};
  Point extent{};
  Point spacing{};

  std::size_t node_count() const;
  std::size_t linear_index(const NodeIndex& idx) const;
  NodeIndex multi_index(std::size_t linear) const;
  Point coordinate(const NodeIndex& idx) const;
  Point coordinate(std::size_t linear) const { return coordinate(multi_index(linear)); }
  bool on_boundary(const NodeIndex& idx) const;
  /// Volume of one dual cell, the nodal quadrature weight.
  double cell_volume() const;
  /// Largest spacing over the active axes.
  double max_spacing() const;
  /// Spacing of an isotropic grid; the geometric mean otherwise.
  double mean_spacing() const;
};

/// Builds a grid with nodes_per_axis nodes on every axis of [origin, origin + extents].
/// An empty origin places the box at zero.
Grid build_grid(int dim, std::span<const double> extents, int nodes_per_axis,
                std::span<const double> origin = {});

struct DomainShape {
  enum class Kind { box, ball };
  Kind kind = Kind::box;
  Point lower{};
  Point upper{};
  Point center{};
  double radius = 0.0;

  static DomainShape box(const Point& lower, const Point& upper);
  /// The box spanned by the whole grid.
  static DomainShape box(const Grid& grid);
  static DomainShape ball(const Point& center, double radius);

  bool strictly_contains(const Point& x, int dim) const;
  double diameter(int dim) const;
};

/// Interior (Dirichlet-free) nodes of a domain on a grid. Exterior nodes carry
/// the homogeneous Dirichlet value and are eliminated from every operator.
class DomainMask {
 public:
  DomainMask(const Grid& grid, const DomainShape& shape);

  const Grid& grid() const { return grid_; }
  const DomainShape& shape() const { return shape_; }
  int dim() const { return grid_.dim; }
  std::size_t interior_count() const { return interior_nodes_.size(); }
  bool is_interior(std::size_t node) const { return interior_of_node_[node] >= 0; }
  /// Interior index of a grid node, -1 for exterior nodes.
  std::int32_t interior_index(std::size_t node) const { return interior_of_node_[node]; }
  std::size_t node_of(std::size_t interior) const { return interior_nodes_[interior]; }
  std::span<const std::size_t> interior_nodes() const { return interior_nodes_; }
  Point coordinate(std::size_t interior) const { return grid_.coordinate(interior_nodes_[interior]); }
  /// Nodal-quadrature measure of the domain.
  double measure() const { return static_cast<double>(interior_count()) * grid_.cell_volume(); }
  double diameter() const { return shape_.diameter(grid_.dim); }

 private:
  Grid grid_;
  DomainShape shape_;
  std::vector<std::int32_t> interior_of_node_;
  std::vector<std::size_t> interior_nodes_;
};

using DomainRef = std::shared_ptr<const DomainMask>;

/// Flags nodes strictly inside the shape and off the grid boundary layer.
/// Throws ConfigError if the shape leaves the grid or the mask is disconnected,
/// DegenerateInputError if no node is interior.
DomainRef build_domain(const Grid& grid, const DomainShape& shape);

}  // namespace rhlab
