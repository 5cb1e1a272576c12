#include "hqflow/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hqflow/errors.hpp"

namespace hqflow {

const char* to_string(EigenStatus s) {
  switch (s) {
    case EigenStatus::ok: return "ok";
    case EigenStatus::non_monotone: return "non_monotone";
    case EigenStatus::non_cauchy: return "non_cauchy";
    case EigenStatus::diverged: return "diverged";
  }
  return "?";
}

FlowOptions regularized_flow_options(const EllipticOptions& opt) {
  FlowOptions f;
  f.mode = FlowMode::steady;
  f.integrator = Integrator::implicit_euler;
  f.tol_steady = opt.tol_steady;
  f.dt_init = opt.dt_init;
  f.dt_max = opt.dt_max;
  f.dt_growth = opt.dt_growth;
  f.max_steps = opt.max_steps;
  f.t_max = std::numeric_limits<double>::infinity();
  return f;
}

namespace {

void require_classical(const ProblemSpec& spec) {
  if (spec.phi_depends_on_u())
    throw ConfigurationError("the eigen-problem needs phi = phi(x)", "problem.phi");
  if (spec.f_depends_on_u())
    throw ConfigurationError("the eigen-problem needs f = f(x)", "problem.f");
}

}  // namespace

RunResult solve_regularized(const Discretization& disc, const ProblemSpec& spec, double eps,
                            const FlowOptions& opt, const GridFn* guess, double s) {
  if (!(eps > 0.0)) throw ArgumentError("solve_regularized: eps must be positive");
  const ProblemSpec reg = spec.regularized(eps, s);
  RunResult res = guess ? run_from(disc, reg, *guess, opt) : run(disc, reg, opt);
  if (res.status != RunStatus::converged) {
    std::ostringstream os;
    os << "regularized solve (eps = " << eps << ", s = " << s << ") stopped with status "
       << to_string(res.status) << " at max|u_t| = "
       << std::max(std::abs(res.records.back().max_ut), std::abs(res.records.back().min_ut));
    if (!res.message.empty()) os << ": " << res.message;
    throw DivergenceError(os.str());
  }
  return res;
}

double s_epsilon(const GridFn& u_eps0, const GridFn& u0, double eps, Point y0) {
  return eps * (u_eps0.interpolate(y0) - u0.interpolate(y0));
}

double speed_bound(const Discretization& disc, const ProblemSpec& spec) {
  const Grid& g = disc.grid();
  const GridFn u0 = initial_state(spec, disc);
  const ProblemSpec plain = spec.regularized(0.0, 0.0);
  double max_logf = 0.0, max_u0 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    max_logf = std::max(max_logf, std::abs(plain.log_f(g.node(i).x, u0[i])));
    max_u0 = std::max(max_u0, std::abs(u0[i]));
  }
  const OperatorEval ev = evaluate_operator(disc, plain, u0);
  double max_logq = 0.0;
  for (std::size_t p : g.interior()) max_logq = std::max(max_logq, std::abs(std::log(ev.quotient[p])));
  return 1.0 + max_logf + max_u0 + max_logq;
}

double eigen_residual(const Discretization& disc, const ProblemSpec& spec, const GridFn& u,
                      double s) {
  const OperatorEval ev = evaluate_operator(disc, spec.regularized(0.0, s), u);
  double r = 0.0;
  for (std::size_t p : disc.grid().interior()) r = std::max(r, std::abs(ev.ut[p]));
  return r;
}

EigenPair solve_eigenpair(const Discretization& disc, const ProblemSpec& spec,
                          const EllipticOptions& opt) {
  require_classical(spec);
  if (opt.levels < 1) throw ArgumentError("solve_eigenpair: need at least two eps levels");
  EigenPair out;
  out.y0 = spec.y0;
  out.M = speed_bound(disc, spec);
  const GridFn u0 = initial_state(spec, disc);
  const FlowOptions fo = regularized_flow_options(opt);

  // Each level solves with s = the latest speed estimate. By the translation
  // identity u_{eps,s} = u_{eps,0} - s/eps, so the stored values stay O(1)
  // instead of growing like s/eps.
  GridFn u_eps;
  double s_prev = 0.0;
  for (int j = 0; j <= opt.levels; ++j) {
    const double eps = opt.eps0 * std::ldexp(1.0, -j);
    RunResult r;
    try {
      r = solve_regularized(disc, spec, eps, fo, j > 0 ? &u_eps : nullptr, s_prev);
    } catch (const DivergenceError& e) {
      out.status = EigenStatus::diverged;
      out.message = e.what();
      return out;
    }
    u_eps = r.state.u;
    const double s = s_epsilon(u_eps, u0, eps, spec.y0) + s_prev;
    out.epsilon_trace.emplace_back(eps, s);
    if (!(s > -out.M && s < out.M)) out.trace_in_bounds = false;
    s_prev = s;
  }

  // first-order Richardson in eps: s_eps = s + c eps + o(eps)
  const std::size_t n = out.epsilon_trace.size();
  const double s_j = out.epsilon_trace[n - 1].second;
  const double s_jm = out.epsilon_trace[n - 2].second;
  out.s = 2.0 * s_j - s_jm;

  std::vector<double> d;
  for (std::size_t i = 1; i < n; ++i)
    d.push_back(out.epsilon_trace[i].second - out.epsilon_trace[i - 1].second);
  const double noise = 1e-12 * (1.0 + std::abs(out.s));
  bool monotone = true;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (std::abs(d[i]) > noise && std::abs(d[i - 1]) > noise && (d[i] > 0) != (d[i - 1] > 0))
      monotone = false;
    if (std::abs(d[i - 1]) > noise) out.difference_ratios.push_back(std::abs(d[i]) / std::abs(d[i - 1]));
  }
  bool cauchy = true;
  for (double r : out.difference_ratios)
    if (r > 0.9) cauchy = false;
  if (!monotone) {
    out.status = EigenStatus::non_monotone;
    out.message = "s_eps trace is not monotone in eps";
  } else if (!cauchy) {
    out.status = EigenStatus::non_cauchy;
    out.message = "s_eps differences do not contract under eps halving";
  }
  if (!out.trace_in_bounds && out.message.empty())
    out.message = "warning: an s_eps value lies outside (-M, M)";

  // u_eps differs from u_{eps,0} - s_J/eps by a constant; fix it at y0
  out.u_ell = u_eps;
  auto& v = out.u_ell.mutable_values();
  const double fix = u0.interpolate(spec.y0) - u_eps.interpolate(spec.y0);
  for (auto& x : v) x += fix;
  out.u_ell.mark_closed();
  out.residual = eigen_residual(disc, spec, out.u_ell, out.s);

  if (spec.q.k == 1 && spec.q.l == 0) {
    try {
      out.oracle_s = laplace_speed_oracle(spec);
    } catch (const ArgumentError&) {
    }
  }
  return out;
}

double laplace_speed_oracle(const ProblemSpec& spec) {
  if (spec.q.k != 1 || spec.q.l != 0)
    throw ArgumentError("laplace_speed_oracle: needs k = 1, l = 0");
  if (spec.phi_depends_on_u() || spec.f_depends_on_u())
    throw ArgumentError("laplace_speed_oracle: needs f = f(x) and phi = phi(x)");
  const double num =
      boundary_integral(spec.dom, [&](Point x) { return spec.phi_at(x, 0.0); });
  const double den = area_integral(spec.dom, [&](Point x) {
    return spec.f.eval({x.x, x.y, 0.0, 0.0});
  });
  if (!(num > 0.0) || !(den > 0.0))
    throw ArgumentError("laplace_speed_oracle: integrals must be positive");
  return std::log(num / den);
}

double check_uniqueness_up_to_constant(const GridFn& u_a, const GridFn& u_b) {
  if (u_a.size() != u_b.size()) throw ArgumentError("grid functions differ in size");
  std::vector<double> d(u_a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = u_a[i] - u_b[i];
  return oscillation(d);
}

double translation_identity_error(const Discretization& disc, const ProblemSpec& spec,
                                  double eps, double s, const EllipticOptions& opt) {
  require_classical(spec);
  const FlowOptions fo = regularized_flow_options(opt);
  const RunResult r0 = solve_regularized(disc, spec, eps, fo);
  const RunResult rs = solve_regularized(disc, spec, eps, fo, &r0.state.u, s);
  double err = 0.0;
  for (std::size_t i = 0; i < r0.state.u.size(); ++i)
    err = std::max(err, std::abs(rs.state.u[i] - (r0.state.u[i] - s / eps)));
  return err;
}

}  // namespace hqflow
