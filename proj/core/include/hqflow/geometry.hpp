#pragma once

// Convex 2-D domains centred at the origin and the structured grids laid
// over them: a boundary-conforming polar grid for disks and ellipses, a
// Cartesian grid for the square.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hqflow {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class DomainKind { disk, ellipse, square };

class Domain {
 public:
  static Domain disk(double radius);
  static Domain ellipse(double a, double b);
  /// Square [-L, L]^2. Not smooth; only meaningful for order studies.
  static Domain square(double half_width);

  [[nodiscard]] DomainKind kind() const noexcept { return kind_; }
  /// Semi-axes (a, b); both equal the radius for a disk and L for a square.
  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] bool nonsmooth() const noexcept { return kind_ == DomainKind::square; }
  [[nodiscard]] std::string describe() const;

 private:
  Domain(DomainKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
  DomainKind kind_;
  double a_;
  double b_;
};

/// Signed distance to the boundary: positive inside, 0 on the boundary,
/// negative outside. Ellipses use a safeguarded Newton projection.
[[nodiscard]] double distance(const Domain& dom, Point x);

/// Nearest boundary point (the projection used by distance()).
[[nodiscard]] Point project_to_boundary(const Domain& dom, Point x);

/// Outward unit normal at a boundary point. Square corners return the
/// diagonal direction. Throws ArgumentError if x is farther than 1e-10
/// from the boundary.
[[nodiscard]] Point normal(const Domain& dom, Point x);

using ScalarOnPoints = std::function<double(Point)>;

/// Arc-length quadrature of g over the boundary with `panels` panels
/// (periodic trapezoid for disk/ellipse, per-side trapezoid for the square).
[[nodiscard]] double boundary_integral(const Domain& dom, const ScalarOnPoints& g,
                                       int panels = 4096);

/// Area integral of g over the domain (tensor Gauss-Legendre in the
/// mapped radius / Cartesian coordinates, trapezoid in angle).
[[nodiscard]] double area_integral(const Domain& dom, const ScalarOnPoints& g, int panels = 256);

enum class GridBackend { polar, cartesian };
enum class NodeKind { interior, boundary };

struct GridResolution {
  int nr = 32;      ///< polar: radial nodes including the boundary ring
  int ntheta = 64;  ///< polar: angular nodes (even)
  int n = 33;       ///< cartesian: nodes per side
};

struct GridNode {
  Point x;
  NodeKind kind = NodeKind::interior;
  Point normal;        ///< outward unit normal (boundary nodes only)
  double weight = 0.0; ///< arc-length weight (boundary nodes only)
  int ring = 0;        ///< polar: radial index j; cartesian: row
  int col = 0;         ///< polar: angular index i; cartesian: column
};

/// Structured grid. Polar nodes sit at mapped radius rho_j = (j + 1/2) drho,
/// j = 0..nr-1, with the last ring exactly on the boundary (drho = 1/(nr - 1/2));
/// x = (a rho cos theta, b rho sin theta). Node index = j * ntheta + i.
/// Cartesian nodes: index = row * n + col over [-L, L]^2.
class Grid {
 public:
  [[nodiscard]] GridBackend backend() const noexcept { return backend_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
  [[nodiscard]] const GridNode& node(std::size_t i) const noexcept { return nodes_[i]; }
  [[nodiscard]] const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<std::size_t>& interior() const noexcept { return interior_; }
  [[nodiscard]] const std::vector<std::size_t>& boundary() const noexcept { return boundary_; }

  [[nodiscard]] int nr() const noexcept { return nr_; }
  [[nodiscard]] int ntheta() const noexcept { return ntheta_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double drho() const noexcept { return drho_; }
  [[nodiscard]] double dtheta() const noexcept { return dtheta_; }
  [[nodiscard]] double h() const noexcept { return h_; }

  /// Smallest physical spacing between neighbouring nodes.
  [[nodiscard]] double h_min() const noexcept { return h_min_; }
  /// Largest physical spacing between neighbouring nodes (the mesh size).
  [[nodiscard]] double h_max() const noexcept { return h_max_; }

  [[nodiscard]] std::size_t polar_index(int ring, int col) const noexcept;
  [[nodiscard]] std::size_t cart_index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * n_ + col;
  }
  [[nodiscard]] std::string describe() const;

 private:
  friend Grid build_grid(const Domain& dom, const GridResolution& res);
  explicit Grid(Domain dom) : domain_(dom) {}

  GridBackend backend_ = GridBackend::polar;
  Domain domain_;
  std::vector<GridNode> nodes_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  int nr_ = 0;
  int ntheta_ = 0;
  int n_ = 0;
  double drho_ = 0.0;
  double dtheta_ = 0.0;
  double h_ = 0.0;
  double h_min_ = 0.0;
  double h_max_ = 0.0;
};

/// Polar grid for disk/ellipse (nr >= 4, ntheta >= 8 and even), Cartesian
/// for the square (n >= 8). Throws ArgumentError on too-small resolutions.
[[nodiscard]] Grid build_grid(const Domain& dom, const GridResolution& res);

/// Scalar field sampled at the nodes of a grid. Tracks whether the
/// boundary values are consistent with a boundary closure (or exact data).
class GridFn {
 public:
  GridFn() = default;
  explicit GridFn(std::shared_ptr<const Grid> grid, double fill = 0.0);

  /// Samples g at every node; the result counts as closed (exact data).
  static GridFn sample(std::shared_ptr<const Grid> grid, const ScalarOnPoints& g);

  [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
  [[nodiscard]] const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

  /// Mutable access. Marks the boundary as not closed.
  [[nodiscard]] std::vector<double>& mutable_values() noexcept {
    closed_ = false;
    return values_;
  }
  void set(std::size_t i, double v) noexcept {
    values_[i] = v;
    closed_ = false;
  }

  [[nodiscard]] bool boundary_closed() const noexcept { return closed_; }
  void mark_closed() noexcept { closed_ = true; }

  [[nodiscard]] bool all_finite() const noexcept;
  /// Bilinear interpolation (in mapped polar or Cartesian coordinates).
  [[nodiscard]] double interpolate(Point p) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
  bool closed_ = false;
};

/// max - min over the given node subset (all nodes when empty).
[[nodiscard]] double oscillation(std::span<const double> values,
                                 const std::vector<std::size_t>& subset = {});

}  // namespace hqflow
