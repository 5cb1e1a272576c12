#pragma once

// Finite-difference gradient/Hessian stencils in Cartesian components on
// both grid backends, and the boundary closure enforcing u_nu = phi(x, u).

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hqflow/geometry.hpp"
#include "hqflow/matrix.hpp"

namespace hqflow {

enum class Deriv : int { x = 0, y = 1, xx = 2, xy = 3, yy = 4 };
inline constexpr int kDerivCount = 5;

struct StencilEntry {
  std::size_t index = 0;
  double weight = 0.0;
};

/// Per-node (neighbour, weight) lists for d/dx, d/dy, d2/dx2, d2/dxdy,
/// d2/dy2. Polar rows already contain the chain rule of the radial map.
class Stencil {
 public:
  [[nodiscard]] std::span<const StencilEntry> row(Deriv d, std::size_t node) const noexcept {
    const auto k = static_cast<int>(d);
    return {entries_[k].data() + offsets_[k][node], offsets_[k][node + 1] - offsets_[k][node]};
  }
  [[nodiscard]] double apply(Deriv d, std::size_t node, std::span<const double> u) const noexcept {
    double s = 0.0;
    for (const auto& e : row(d, node)) s += e.weight * u[e.index];
    return s;
  }

 private:
  friend Stencil build_stencil(const Grid& grid);
  std::array<std::vector<std::size_t>, kDerivCount> offsets_;
  std::array<std::vector<StencilEntry>, kDerivCount> entries_;
};

[[nodiscard]] Stencil build_stencil(const Grid& grid);

/// Discrete outward normal derivative at one boundary node:
///   u_nu ~ self_weight * u[node] + sum(others).
struct ClosureRow {
  std::size_t node = 0;
  double self_weight = 0.0;
  std::vector<StencilEntry> others;
};

struct BoundaryClosure {
  std::vector<ClosureRow> rows;  ///< one per boundary node, in node order
};

[[nodiscard]] BoundaryClosure build_closure(const Grid& grid, const Stencil& stencil);

/// Grid + stencils + closure, built once and shared read-only.
class Discretization {
 public:
  explicit Discretization(std::shared_ptr<const Grid> grid);

  [[nodiscard]] const Grid& grid() const noexcept { return *grid_; }
  [[nodiscard]] const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
  [[nodiscard]] const Stencil& stencil() const noexcept { return stencil_; }
  [[nodiscard]] const BoundaryClosure& closure() const noexcept { return closure_; }

 private:
  std::shared_ptr<const Grid> grid_;
  Stencil stencil_;
  BoundaryClosure closure_;
};

/// Boundary data phi(x, u).
using BoundaryFn = std::function<double(Point, double)>;

/// Discrete Hessian at every node (boundary rows use one-sided stencils).
/// Throws StateError if u's boundary values have not been closed.
[[nodiscard]] std::vector<SymMatrix> hessian(const Discretization& disc, const GridFn& u);

/// Hessian at a single node as (u_xx, u_xy, u_yy).
[[nodiscard]] std::array<double, 3> hessian_at(const Discretization& disc,
                                               std::span<const double> u, std::size_t node);

/// Discrete gradient (u_x, u_y) at every node. Throws StateError as hessian().
[[nodiscard]] std::vector<std::array<double, 2>> gradient(const Discretization& disc,
                                                          const GridFn& u);

/// Discrete normal derivative at closure row r.
[[nodiscard]] double normal_derivative(const Discretization& disc, std::span<const double> u,
                                       std::size_t r);

struct NeumannOptions {
  double tolerance = 1e-12;  ///< relative residual of the scalar relation
  int max_iterations = 50;   ///< per scalar solve
  int max_sweeps = 200;      ///< Gauss-Seidel sweeps over coupled boundary rows
};

/// Sets every boundary value so the discrete normal derivative equals
/// phi(x, u_boundary). Each node solves a monotone scalar relation by
/// bracketed Newton; rows that couple boundary neighbours (ellipse
/// tangential terms, square corners) are swept Gauss-Seidel until
/// stationary. Throws ConfigurationError when phi is increasing in u.
[[nodiscard]] GridFn apply_neumann(const Discretization& disc, const GridFn& u,
                                   const BoundaryFn& phi, const NeumannOptions& opt = {});

/// Largest relative residual |u_nu - phi| / scale over the boundary.
[[nodiscard]] double neumann_residual(const Discretization& disc, const GridFn& u,
                                      const BoundaryFn& phi);

}  // namespace hqflow
