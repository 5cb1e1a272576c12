#include "hqflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqflow/errors.hpp"

namespace hqflow {

namespace {

double f_value(const ProblemSpec& spec, Point x, double u) {
  return spec.f.eval({x.x, x.y, u, 0.0});
}

std::string where(Point x) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << x.x << ", " << x.y << ")";
  return os.str();
}

}  // namespace

double ProblemSpec::log_f(Point x, double u) const {
  const double fv = f_value(*this, x, u);
  if (!(fv > 0.0)) throw ConfigurationError("f > 0 violated at " + where(x), "problem.f");
  return std::log(fv) + s_shift + eps_reg * u;
}

double ProblemSpec::dlog_f_du(Point x, double u) const {
  double d = eps_reg;
  if (f_depends_on_u()) d += partial_u(f, {x.x, x.y, u, 0.0}) / f_value(*this, x, u);
  return d;
}

BoundaryFn ProblemSpec::boundary_fn() const {
  return [phi = phi](Point x, double u) { return phi.eval({x.x, x.y, u, 0.0}); };
}

ProblemSpec ProblemSpec::regularized(double eps, double s) const {
  ProblemSpec out = *this;
  out.eps_reg = eps;
  out.s_shift = s;
  return out;
}

GridFn initial_state(const ProblemSpec& spec, const Discretization& disc) {
  const GridFn raw = GridFn::sample(disc.grid_ptr(), [&](Point x) { return spec.u0_at(x); });
  return apply_neumann(disc, raw, spec.boundary_fn());
}

StructuralReport validate_problem(const ProblemSpec& spec, const Discretization& disc) {
  StructuralReport rep;
  const Grid& g = disc.grid();
  QuotientIndices q = spec.q;
  q.n = 2;
  try {
    q.validate();
  } catch (const ArgumentError& e) {
    throw ConfigurationError(std::string("quotient orders: ") + e.what(), "problem.k");
  }
  if (spec.f.empty()) throw ConfigurationError("missing f", "problem.f");
  if (spec.phi.empty()) throw ConfigurationError("missing phi", "problem.phi");
  if (spec.u0.empty()) throw ConfigurationError("missing u0", "problem.u0");
  if (spec.dom.nonsmooth()) {
    if (!spec.allow_nonsmooth)
      throw ConfigurationError(
          "square domain is not smooth and strictly convex; set problem.allow_nonsmooth = true",
          "problem.domain");
    rep.outside_theory = true;
  }

  // f > 0 and f_u >= 0 at every node for u around u0
  rep.min_f = std::numeric_limits<double>::infinity();
  rep.c_f = std::numeric_limits<double>::infinity();
  for (const auto& nd : g.nodes()) {
    const double base = spec.u0_at(nd.x);
    for (double du : {-1.0, 0.0, 1.0}) {
      const double u = base + du;
      double fv = 0.0;
      try {
        fv = f_value(spec, nd.x, u);
      } catch (const EvalDomainError& e) {
        throw ConfigurationError(std::string("f cannot be evaluated at ") + where(nd.x) + ": " +
                                     e.what(),
                                 "problem.f");
      }
      if (!(fv > 0.0)) throw ConfigurationError("f > 0 violated at " + where(nd.x), "problem.f");
      rep.min_f = std::min(rep.min_f, fv);
      if (spec.f_depends_on_u()) {
        const double fu = partial_u(spec.f, {nd.x.x, nd.x.y, u, 0.0});
        if (fu < -1e-8)
          throw ConfigurationError("f_u >= 0 violated at " + where(nd.x), "problem.f");
        rep.c_f = std::min(rep.c_f, fu / fv + spec.eps_reg);
      } else {
        rep.c_f = std::min(rep.c_f, spec.eps_reg);
      }
    }
  }
  rep.growth_condition = rep.c_f > 1e-12;

  // phi_u <= c_phi < 0
  if (spec.phi_depends_on_u()) {
    rep.c_phi = -std::numeric_limits<double>::infinity();
    for (std::size_t b : g.boundary()) {
      const Point x = g.node(b).x;
      const double base = spec.u0_at(x);
      for (double du : {-1.0, 0.0, 1.0})
        rep.c_phi = std::max(rep.c_phi, partial_u(spec.phi, {x.x, x.y, base + du, 0.0}));
    }
    if (!(rep.c_phi < 0.0)) {
      std::ostringstream os;
      os << "phi_u <= c_phi < 0 violated (sampled max phi_u = " << rep.c_phi << ")";
      throw ConfigurationError(os.str(), "problem.phi");
    }
  }

  const GridFn raw = GridFn::sample(disc.grid_ptr(), [&](Point x) { return spec.u0_at(x); });
  rep.initial_neumann_residual = neumann_residual(disc, raw, spec.boundary_fn());
  const GridFn u = apply_neumann(disc, raw, spec.boundary_fn());

  // k-admissibility of u0 and the subsolution property
  rep.initial_subsolution = true;
  for (std::size_t node : g.interior()) {
    const auto h = hessian_at(disc, u.values(), node);
    const double lam_mid = 0.5 * (h[0] + h[2]);
    const double rad = std::hypot(0.5 * (h[0] - h[2]), h[1]);
    const double lam[2] = {lam_mid + rad, lam_mid - rad};
    const auto s = sigma_all(lam, q.k);
    for (int i = 1; i <= q.k; ++i) {
      if (!(s[i] > 0.0)) {
        std::ostringstream os;
        os << "u0 is not in Gamma_" << q.k << " at node " << node << " " << where(g.node(node).x)
           << ": sigma_" << i << " = " << s[i];
        throw ConfigurationError(os.str(), "problem.u0");
      }
    }
    const double quot = s[q.k] / s[q.l];
    if (quot < f_value(spec, g.node(node).x, u[node]) * std::exp(spec.s_shift + spec.eps_reg * u[node]) - 1e-8)
      rep.initial_subsolution = false;
  }
  return rep;
}

}  // namespace hqflow
