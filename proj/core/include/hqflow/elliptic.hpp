#pragma once

// Steady and eigen-problems: sigma_k/sigma_l(D^2 u) = f(x) e^s with
// u_nu = phi(x), via the regularized family f -> f e^{s + eps u}.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hqflow/flow.hpp"

namespace hqflow {

struct EllipticOptions {
  double eps0 = 1.0;
  int levels = 6;  ///< schedule eps_j = eps0 2^-j, j = 0..levels
  double tol_steady = 1e-8;
  /// Pseudo-time stepping for the regularized solves; large steps make each
  /// implicit step a Newton iteration.
  double dt_init = 0.1;
  double dt_max = 1e6;
  double dt_growth = 4.0;
  long max_steps = 400;
};

/// Flow options used for one regularized solve.
[[nodiscard]] FlowOptions regularized_flow_options(const EllipticOptions& opt);

/// Steady state of the flow with f replaced by f e^{s + eps u}. Starts from
/// `guess` when given, else from the projected u0. Throws DivergenceError
/// when the flow diverges or stops before reaching tol_steady.
[[nodiscard]] RunResult solve_regularized(const Discretization& disc, const ProblemSpec& spec,
                                          double eps, const FlowOptions& opt,
                                          const GridFn* guess = nullptr, double s = 0.0);

/// eps * (u_eps0(y0) - u0(y0)), values at y0 by interpolation.
[[nodiscard]] double s_epsilon(const GridFn& u_eps0, const GridFn& u0, double eps, Point y0);

/// M = 1 + max|log f| + max|u0| + max|log quotient(D^2 u0)| over the grid.
[[nodiscard]] double speed_bound(const Discretization& disc, const ProblemSpec& spec);

enum class EigenStatus { ok, non_monotone, non_cauchy, diverged };
[[nodiscard]] const char* to_string(EigenStatus s);

struct EigenPair {
  double s = 0.0;  ///< Richardson-extrapolated speed
  GridFn u_ell;    ///< profile with u_ell(y0) = u0(y0)
  Point y0{};
  std::vector<std::pair<double, double>> epsilon_trace;  ///< (eps, s_eps)
  std::vector<double> difference_ratios;  ///< |d_{j+1}| / |d_j| of the trace
  double M = 0.0;
  bool trace_in_bounds = true;  ///< every s_eps in (-M, M)
  double residual = 0.0;        ///< max |log quotient(D^2 u_ell) - log f - s|
  std::optional<double> oracle_s;
  EigenStatus status = EigenStatus::ok;
  std::string message;
};

/// Runs the eps schedule, extrapolates s, builds the profile and its residual.
[[nodiscard]] EigenPair solve_eigenpair(const Discretization& disc, const ProblemSpec& spec,
                                        const EllipticOptions& opt = {});

/// max over interior nodes of |log quotient(D^2 u) - log f - s|.
[[nodiscard]] double eigen_residual(const Discretization& disc, const ProblemSpec& spec,
                                    const GridFn& u, double s);

/// log(boundary integral of phi / area integral of f), the exact speed when
/// k = 1, l = 0 by the divergence theorem. Throws ArgumentError for other
/// orders, u-dependent data, or nonpositive integrals.
[[nodiscard]] double laplace_speed_oracle(const ProblemSpec& spec);

/// osc(u_a - u_b).
[[nodiscard]] double check_uniqueness_up_to_constant(const GridFn& u_a, const GridFn& u_b);

/// max |u_{eps,s} - (u_{eps,0} - s/eps)| from two regularized solves.
[[nodiscard]] double translation_identity_error(const Discretization& disc,
                                                const ProblemSpec& spec, double eps, double s,
                                                const EllipticOptions& opt = {});

}  // namespace hqflow
