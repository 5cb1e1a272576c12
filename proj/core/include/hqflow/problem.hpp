#pragma once

// Problem data for u_t = log(sigma_k/sigma_l)(D^2 u) - log f(x,u) with
// u_nu = phi(x,u), and the structural checks run before any compute.

#include <limits>
#include <string>

#include "hqflow/discretize.hpp"
#include "hqflow/expr.hpp"
#include "hqflow/geometry.hpp"
#include "hqflow/symmfunc.hpp"

namespace hqflow {

struct ProblemSpec {
  QuotientIndices q{1, 0, 2};
  Domain dom = Domain::disk(1.0);
  Expr f;      ///< f(x1, x2, u) > 0
  Expr phi;    ///< phi(x1, x2, u)
  Expr u0;     ///< u0(x1, x2)
  Expr exact;  ///< optional manufactured solution (empty when unknown)
  Point y0{};  ///< normalization point of the eigen-problem
  bool allow_nonsmooth = false;

  /// Regularization f -> f * exp(s_shift + eps_reg * u) of the eigen scheme.
  double eps_reg = 0.0;
  double s_shift = 0.0;

  /// log f(x,u) including the regularization factor.
  [[nodiscard]] double log_f(Point x, double u) const;
  /// d/du of log_f (finite difference in u for f, exact for the factor).
  [[nodiscard]] double dlog_f_du(Point x, double u) const;
  [[nodiscard]] double phi_at(Point x, double u) const {
    return phi.eval({x.x, x.y, u, 0.0});
  }
  [[nodiscard]] double u0_at(Point x) const { return u0.eval({x.x, x.y, 0.0, 0.0}); }
  [[nodiscard]] BoundaryFn boundary_fn() const;

  [[nodiscard]] bool phi_depends_on_u() const { return phi.references(Var::u); }
  [[nodiscard]] bool f_depends_on_u() const { return f.references(Var::u); }

  /// Copy with f replaced by f * exp(s + eps * u).
  [[nodiscard]] ProblemSpec regularized(double eps, double s) const;
};

/// Sampled structural constants of a problem on a given grid.
struct StructuralReport {
  double min_f = 0.0;
  /// max phi_u over boundary samples (NaN when phi does not depend on u).
  double c_phi = std::numeric_limits<double>::quiet_NaN();
  /// min (log f)_u = f_u/f over samples; > 0 means the growth condition
  /// f_u/f >= c_f > 0 holds.
  double c_f = 0.0;
  bool growth_condition = false;
  /// sigma_k/sigma_l(D^2 u0) >= f(x, u0) - 1e-8 at every interior node.
  bool initial_subsolution = false;
  /// Largest |u_nu - phi| of u0 before the t = 0 projection.
  double initial_neumann_residual = 0.0;
  bool outside_theory = false;
};

/// Checks f > 0, f_u >= 0, phi_u <= c_phi < 0 (when phi depends on u), and
/// k-admissibility of the projected u0. Throws ConfigurationError whose
/// field() names the offending config entry; admissibility failures name the
/// node and the first failing sigma_i.
[[nodiscard]] StructuralReport validate_problem(const ProblemSpec& spec,
                                                const Discretization& disc);

/// u0 sampled on the grid and projected once onto the boundary relation.
[[nodiscard]] GridFn initial_state(const ProblemSpec& spec, const Discretization& disc);

}  // namespace hqflow
