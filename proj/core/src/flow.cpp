#include "hqflow/flow.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hqflow/errors.hpp"

namespace hqflow {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::diverged: return "diverged";
    case RunStatus::t_max: return "t_max";
  }
  return "?";
}

const char* to_string(FlowMode m) { return m == FlowMode::steady ? "steady" : "translating"; }

OperatorEval evaluate_operator(const Discretization& disc, const ProblemSpec& spec,
                               const GridFn& u, double cone_slack) {
  if (!u.boundary_closed()) throw StateError("operator evaluation needs closed boundary values");
  const Grid& g = disc.grid();
  QuotientIndices q = spec.q;
  q.n = 2;

  OperatorEval ev;
  ev.ut.assign(g.size(), 0.0);
  ev.F.assign(g.size(), {0.0, 0.0, 0.0});
  ev.quotient.assign(g.size(), 0.0);
  ev.min_quotient = std::numeric_limits<double>::infinity();

  for (std::size_t node : g.interior()) {
    const auto h = hessian_at(disc, u.values(), node);
    SymMatrix a(2);
    a.set(0, 0, h[0]);
    a.set(0, 1, h[1]);
    a.set(1, 1, h[2]);
    if (!a.all_finite()) {
      std::ostringstream os;
      os << "non-finite Hessian at node " << node;
      throw AdmissibilityError(os.str(), 0, std::numeric_limits<double>::quiet_NaN(),
                               static_cast<long>(node));
    }
    const SpectralDecomposition eig = eigen_sym(a);
    const double s1 = eig.values[0] + eig.values[1];
    LogQuotient lq;
    try {
      lq = log_quotient_matrix(eig, q, cone_slack * (1.0 + std::abs(s1)));
    } catch (const AdmissibilityError& e) {
      std::ostringstream os;
      os << "Hessian leaves Gamma_" << q.k << " at node " << node << ": sigma_"
         << e.failing_order() << " = " << e.failing_value();
      throw AdmissibilityError(os.str(), e.failing_order(), e.failing_value(),
                               static_cast<long>(node));
    }
    const Point x = g.node(node).x;
    ev.ut[node] = lq.value - spec.log_f(x, u[node]);
    ev.F[node] = {lq.F(0, 0), lq.F(0, 1), lq.F(1, 1)};
    const double fm = 0.5 * (lq.F(0, 0) + lq.F(1, 1));
    const double fr = std::hypot(0.5 * (lq.F(0, 0) - lq.F(1, 1)), lq.F(0, 1));
    ev.g_max = std::max(ev.g_max, fm + fr);
    ev.sup_hess = std::max({ev.sup_hess, std::abs(eig.values[0]), std::abs(eig.values[1])});
    ev.quotient[node] = std::exp(lq.value);
    ev.min_quotient = std::min(ev.min_quotient, ev.quotient[node]);
  }
  return ev;
}

GridFn rhs(const Discretization& disc, const ProblemSpec& spec, const GridFn& u, double /*t*/) {
  const OperatorEval ev = evaluate_operator(disc, spec, u);
  GridFn out(disc.grid_ptr());
  out.mutable_values() = ev.ut;
  return out;
}

namespace {

double dt_from_eval(const Discretization& disc, const OperatorEval& ev, double cfl) {
  if (!std::isfinite(ev.g_max) || !(ev.g_max > 0.0))
    throw DivergenceError("select_dt: largest eigenvalue of F is not finite and positive");
  const double h = disc.grid().h_min();
  return cfl * h * h / (2.0 * 2.0 * ev.g_max);
}

}  // namespace

double select_dt(const Discretization& disc, const ProblemSpec& spec, const FlowState& state,
                 double cfl) {
  OperatorEval ev;
  try {
    ev = evaluate_operator(disc, spec, state.u);
  } catch (const AdmissibilityError& e) {
    throw DivergenceError(std::string("select_dt: ") + e.what());
  }
  return dt_from_eval(disc, ev, cfl);
}

struct FlowStepper::Impl {
  using SpMat = Eigen::SparseMatrix<double>;

  const Discretization& disc;
  ProblemSpec spec;
  FlowOptions opt;
  BoundaryFn phi;

  std::vector<double> cached_u;
  OperatorEval cached;
  bool have_cache = false;

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;

  Impl(const Discretization& d, const ProblemSpec& s, FlowOptions o)
      : disc(d), spec(s), opt(o), phi(s.boundary_fn()) {}

  const OperatorEval& eval(const GridFn& u) {
    if (!have_cache || cached_u != u.values()) {
      cached = evaluate_operator(disc, spec, u, opt.cone_slack);
      cached_u = u.values();
      have_cache = true;
    }
    return cached;
  }

  // Linearized step: (I/dt - J) delta = G on interior rows, linearized
  // boundary relation on boundary rows.
  bool implicit_delta(const GridFn& u, const OperatorEval& ev, double dt,
                      std::vector<double>& delta) {
    const Grid& g = disc.grid();
    const Stencil& st = disc.stencil();
    const std::size_t n = g.size();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n * 40);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));

    for (std::size_t p : g.interior()) {
      const Point x = g.node(p).x;
      const auto& F = ev.F[p];
      trip.emplace_back(p, p, 1.0 / dt + spec.dlog_f_du(x, u[p]));
      for (const auto& e : st.row(Deriv::xx, p)) trip.emplace_back(p, e.index, -F[0] * e.weight);
      for (const auto& e : st.row(Deriv::xy, p))
        trip.emplace_back(p, e.index, -2.0 * F[1] * e.weight);
      for (const auto& e : st.row(Deriv::yy, p)) trip.emplace_back(p, e.index, -F[2] * e.weight);
      b[static_cast<Eigen::Index>(p)] = ev.ut[p];
    }
    const auto& rows = disc.closure().rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const ClosureRow& row = rows[r];
      const Point x = g.node(row.node).x;
      const double ub = u[row.node];
      const double hu = 1e-6 * (1.0 + std::abs(ub));
      const double phi_u = (phi(x, ub + hu) - phi(x, ub - hu)) / (2.0 * hu);
      trip.emplace_back(row.node, row.node, row.self_weight - phi_u);
      for (const auto& e : row.others) trip.emplace_back(row.node, e.index, e.weight);
      b[static_cast<Eigen::Index>(row.node)] =
          phi(x, ub) - normal_derivative(disc, u.values(), r);
    }

    SpMat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      lu.analyzePattern(a);
      analyzed = true;
    }
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) return false;
    delta.assign(x.data(), x.data() + n);
    for (double d : delta)
      if (!std::isfinite(d)) return false;
    return true;
  }

  FlowState step(const FlowState& state) {
    const GridFn& u = state.u;
    const OperatorEval ev = eval(u);
    const Grid& g = disc.grid();

    double dt = opt.integrator == Integrator::explicit_euler ? dt_from_eval(disc, ev, opt.cfl)
                                                             : state.dt;
    if (!(dt > 0.0)) dt = opt.dt_init;

    for (int attempt = 0; attempt <= opt.max_halvings; ++attempt) {
      GridFn next = u;
      bool ok = true;
      if (opt.integrator == Integrator::explicit_euler) {
        auto& v = next.mutable_values();
        for (std::size_t p : g.interior()) v[p] += dt * ev.ut[p];
      } else {
        std::vector<double> delta;
        ok = implicit_delta(u, ev, dt, delta);
        if (ok) {
          auto& v = next.mutable_values();
          for (std::size_t p = 0; p < v.size(); ++p) v[p] += delta[p];
        }
      }
      if (ok) {
        next = apply_neumann(disc, next, phi);
        try {
          const OperatorEval nev = evaluate_operator(disc, spec, next, opt.cone_slack);
          bool finite = next.all_finite();
          for (double x : nev.ut) finite = finite && std::isfinite(x);
          if (finite) {
            cached = nev;
            cached_u = next.values();
            have_cache = true;
            FlowState out;
            out.t = state.t + dt;
            out.offset = state.offset;
            out.u = std::move(next);
            out.step_count = state.step_count + 1;
            out.dt = opt.integrator == Integrator::implicit_euler && attempt == 0
                         ? std::min(dt * opt.dt_growth, opt.dt_max)
                         : dt;
            return out;
          }
        } catch (const AdmissibilityError&) {
        }
      }
      dt *= 0.5;
    }
    FlowState out = state;
    out.diverged = true;
    return out;
  }
};

FlowStepper::FlowStepper(const Discretization& disc, const ProblemSpec& spec, FlowOptions opt)
    : impl_(std::make_unique<Impl>(disc, spec, opt)) {}

FlowStepper::~FlowStepper() = default;

FlowState FlowStepper::step(const FlowState& state) { return impl_->step(state); }

const OperatorEval& FlowStepper::current_eval(const FlowState& state) {
  return impl_->eval(state.u);
}

GridFn solution(const FlowState& state) {
  GridFn out = state.u;
  if (state.offset != 0.0) {
    for (auto& x : out.mutable_values()) x += state.offset;
    out.mark_closed();
  }
  return out;
}

FlowState step(const Discretization& disc, const ProblemSpec& spec, const FlowState& state,
               const FlowOptions& opt) {
  FlowStepper stepper(disc, spec, opt);
  return stepper.step(state);
}

MonitorRecord monitors(const Discretization& disc, const FlowState& state,
                       const OperatorEval& ev) {
  const Grid& g = disc.grid();
  MonitorRecord r;
  r.t = state.t;
  r.max_ut = -std::numeric_limits<double>::infinity();
  r.min_ut = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t p : g.interior()) {
    r.max_ut = std::max(r.max_ut, ev.ut[p]);
    r.min_ut = std::min(r.min_ut, ev.ut[p]);
    sum += ev.ut[p];
  }
  r.mean_ut = sum / static_cast<double>(g.interior().size());
  r.osc = r.max_ut - r.min_ut;
  const auto& v = state.u.values();
  r.min_u = *std::min_element(v.begin(), v.end()) + state.offset;
  r.max_u = *std::max_element(v.begin(), v.end()) + state.offset;
  for (const auto& gr : gradient(disc, state.u)) r.sup_grad = std::max(r.sup_grad, std::hypot(gr[0], gr[1]));
  r.sup_hess = ev.sup_hess;
  r.min_quotient = ev.min_quotient;
  r.admissible = !state.diverged;
  return r;
}

InitialBounds initial_bounds(const Discretization& disc, const ProblemSpec& spec,
                             const StructuralReport& rep, const GridFn& u0,
                             const OperatorEval& ev0) {
  const Grid& g = disc.grid();
  InitialBounds b;
  b.max_ut0 = -std::numeric_limits<double>::infinity();
  b.min_ut0 = std::numeric_limits<double>::infinity();
  for (std::size_t p : g.interior()) {
    b.max_ut0 = std::max(b.max_ut0, ev0.ut[p]);
    b.min_ut0 = std::min(b.min_ut0, ev0.ut[p]);
  }
  b.max_abs_ut0 = std::max(std::abs(b.max_ut0), std::abs(b.min_ut0));

  double max_abs_u0 = 0.0;
  for (double x : u0.values()) max_abs_u0 = std::max(max_abs_u0, std::abs(x));

  if (rep.growth_condition && spec.phi_depends_on_u() && rep.c_phi < 0.0) {
    double max_phi0 = 0.0;
    for (std::size_t node : g.boundary())
      max_phi0 = std::max(max_phi0, std::abs(spec.phi_at(g.node(node).x, 0.0)));
    b.M0 = max_phi0 / std::abs(rep.c_phi) + max_abs_u0 + 2.0 * b.max_abs_ut0 / rep.c_f;
  }
  const bool f_uses_u = spec.f_depends_on_u() || spec.eps_reg != 0.0;
  if (b.M0 || !f_uses_u) {
    const double at_u = b.M0 ? -*b.M0 : 0.0;
    double min_f = std::numeric_limits<double>::infinity();
    for (const auto& nd : g.nodes()) min_f = std::min(min_f, std::exp(spec.log_f(nd.x, at_u)));
    b.c2 = min_f * std::exp(-b.max_abs_ut0);
  }
  return b;
}

double fit_decay_rate(const std::vector<MonitorRecord>& records) {
  const std::size_t n = records.size();
  if (n < 4) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double m = 0.0;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double y = std::max(std::abs(records[i].max_ut), std::abs(records[i].min_ut));
    if (!(y > 0.0)) continue;
    const double x = records[i].t;
    const double ly = std::log(y);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    m += 1.0;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2.0 || den <= 0.0) return 0.0;
  return -(m * sxy - sx * sy) / den;
}

RunResult run_from(const Discretization& disc, const ProblemSpec& spec, const GridFn& u_start,
                   const FlowOptions& opt, const TranslatingReference* reference) {
  RunResult res;
  res.structure = validate_problem(spec, disc);
  FlowStepper stepper(disc, spec, opt);

  FlowState state;
  state.u = u_start;
  if (!state.u.boundary_closed()) state.u = apply_neumann(disc, state.u, spec.boundary_fn());
  state.dt = opt.dt_init;

  const OperatorEval& ev0 = stepper.current_eval(state);
  res.bounds = initial_bounds(disc, spec, res.structure, state.u, ev0);

  auto make_checkpoint = [&](const FlowState& s, const MonitorRecord& rec) {
    Checkpoint c;
    c.t = s.t;
    c.step = s.step_count;
    c.osc_ut = rec.osc;
    if (reference) {
      std::vector<double> w(s.u.size());
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = s.u[i] + s.offset - reference->u_ref[i] - reference->s_ref * s.t;
      c.osc_w = oscillation(w);
    }
    res.checkpoints.push_back(c);
  };

  res.records.push_back(monitors(disc, state, ev0));
  make_checkpoint(state, res.records.back());

  const bool shift_invariant = opt.mode == FlowMode::translating && !spec.f_depends_on_u() &&
                               !spec.phi_depends_on_u() && spec.eps_reg == 0.0;

  auto stop = [&]() {
    const MonitorRecord& r = res.records.back();
    if (opt.mode == FlowMode::steady)
      return std::max(std::abs(r.max_ut), std::abs(r.min_ut)) < opt.tol_steady;
    if (r.osc >= opt.tol_trans) return false;
    const std::size_t n = res.records.size();
    if (n <= static_cast<std::size_t>(opt.window)) return false;
    return std::abs(r.mean_ut - res.records[n - 1 - opt.window].mean_ut) < opt.tol_trans;
  };

  for (;;) {
    if (stop()) {
      res.status = RunStatus::converged;
      break;
    }
    if (state.t >= opt.t_max || state.step_count >= opt.max_steps) {
      res.status = RunStatus::t_max;
      res.message = "t_max or step limit reached before the stop rule fired";
      break;
    }
    FlowState next = stepper.step(state);
    if (next.diverged) {
      res.status = RunStatus::diverged;
      std::ostringstream os;
      os << "step at t = " << state.t << " left Gamma_" << spec.q.k << " after "
         << opt.max_halvings << " halvings of dt";
      res.message = os.str();
      MonitorRecord last = res.records.back();
      last.admissible = false;
      res.records.push_back(last);
      state.diverged = true;
      break;
    }
    state = std::move(next);
    if (shift_invariant) {
      double mean = 0.0;
      for (double x : state.u.values()) mean += x;
      const double k = std::trunc(mean / static_cast<double>(state.u.size()));
      if (k != 0.0) {
        for (auto& x : state.u.mutable_values()) x -= k;
        state.u.mark_closed();
        state.offset += k;
      }
    }
    res.records.push_back(monitors(disc, state, stepper.current_eval(state)));
    if (opt.checkpoint_every > 0 && state.step_count % opt.checkpoint_every == 0)
      make_checkpoint(state, res.records.back());
  }

  res.state = state;
  res.decay_rate = fit_decay_rate(res.records);
  res.speed = res.records.back().mean_ut;
  for (const auto& r : res.records)
    res.c37 = std::max({res.c37, std::abs(r.max_u - res.speed * r.t),
                        std::abs(r.min_u - res.speed * r.t)});
  if (reference) {
    double sum = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i)
      sum += state.u[i] + state.offset - reference->u_ref[i] - reference->s_ref * state.t;
    res.a_offset = sum / static_cast<double>(state.u.size());
  }
  return res;
}

RunResult run(const Discretization& disc, const ProblemSpec& spec, const FlowOptions& opt,
              const TranslatingReference* reference) {
  // structural diagnostics take precedence over failures of the u0 projection
  (void)validate_problem(spec, disc);
  return run_from(disc, spec, initial_state(spec, disc), opt, reference);
}

MonitorChecks check_monitors(const RunResult& res, const FlowOptions& opt,
                             std::optional<double> checkpoint_tol) {
  MonitorChecks c;
  const InitialBounds& b = res.bounds;
  c.tol_mp = 1e-6 * (1.0 + b.max_abs_ut0);
  const double ck_tol = checkpoint_tol.value_or(c.tol_mp);
  const double hi = std::max(b.max_ut0, 0.0);
  const double lo = std::min(b.min_ut0, 0.0);
  const double lambda = 0.8 * res.structure.c_f;

  for (const auto& r : res.records) {
    if (!r.admissible) continue;
    const double ex = std::max(r.max_ut - hi, lo - r.min_ut);
    c.worst_ut_excess = std::max(c.worst_ut_excess, ex);
    if (ex > c.tol_mp) c.ut_max_principle = false;

    if (res.structure.growth_condition) {
      const double m = std::max(std::abs(r.max_ut), std::abs(r.min_ut));
      if (m * std::exp(lambda * r.t) > b.max_abs_ut0 + c.tol_mp) c.ut_decay = false;
    }
    if (b.M0) {
      const double e = std::max(std::abs(r.max_u), std::abs(r.min_u)) - *b.M0;
      c.worst_c0_excess = std::max(c.worst_c0_excess, e);
      if (e > c.tol_mp) c.c0_bound = false;
    }
    if (b.c2) {
      const double e = *b.c2 - r.min_quotient;
      c.worst_floor_excess = std::max(c.worst_floor_excess, e);
      if (e > c.tol_mp) c.quotient_floor = false;
    }
  }

  if (!res.records.empty()) {
    const std::size_t head = std::max<std::size_t>(1, res.records.size() / 10);
    double g0 = 0.0, h0 = 0.0;
    for (std::size_t i = 0; i < head; ++i) {
      g0 = std::max(g0, res.records[i].sup_grad);
      h0 = std::max(h0, res.records[i].sup_hess);
    }
    const auto& last = res.records.back();
    c.derivatives_bounded = last.sup_grad <= 10.0 * g0 + 1e-12 && last.sup_hess <= 10.0 * h0 + 1e-12;
  }

  if (opt.mode == FlowMode::translating) {
    for (std::size_t i = 1; i < res.checkpoints.size(); ++i) {
      const double inc = res.checkpoints[i].osc_ut - res.checkpoints[i - 1].osc_ut;
      c.worst_checkpoint_increase = std::max(c.worst_checkpoint_increase, inc);
      if (inc > ck_tol) c.checkpoints_nonincreasing = false;
    }
  }
  return c;
}

}  // namespace hqflow
