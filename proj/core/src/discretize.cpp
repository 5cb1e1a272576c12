#include "hqflow/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqflow/errors.hpp"

namespace hqflow {

namespace {

// Sparse row under construction; finalize() sorts, merges and drops
// rounding-level weights.
class RowBuilder {
 public:
  void add(std::size_t index, double w) { items_.push_back({index, w}); }
  void add_scaled(const RowBuilder& other, double s) {
    if (s == 0.0) return;
    for (const auto& e : other.items_) items_.push_back({e.index, s * e.weight});
  }
  [[nodiscard]] std::vector<StencilEntry> finalize() const {
    std::vector<StencilEntry> v = items_;
    std::stable_sort(v.begin(), v.end(),
                     [](const StencilEntry& a, const StencilEntry& b) { return a.index < b.index; });
    std::vector<StencilEntry> merged;
    for (const auto& e : v) {
      if (!merged.empty() && merged.back().index == e.index)
        merged.back().weight += e.weight;
      else
        merged.push_back(e);
    }
    double wmax = 0.0;
    for (const auto& e : merged) wmax = std::max(wmax, std::abs(e.weight));
    std::vector<StencilEntry> out;
    for (const auto& e : merged)
      if (std::abs(e.weight) > 1e-13 * wmax) out.push_back(e);
    return out;
  }

 private:
  std::vector<StencilEntry> items_;
};

using Rows = std::array<RowBuilder, kDerivCount>;

RowBuilder d1_1d(int p, int n, double h, const std::function<std::size_t(int)>& at) {
  RowBuilder r;
  if (p > 0 && p < n - 1) {
    r.add(at(p - 1), -0.5 / h);
    r.add(at(p + 1), 0.5 / h);
  } else if (p == 0) {
    r.add(at(0), -1.5 / h);
    r.add(at(1), 2.0 / h);
    r.add(at(2), -0.5 / h);
  } else {
    r.add(at(n - 1), 1.5 / h);
    r.add(at(n - 2), -2.0 / h);
    r.add(at(n - 3), 0.5 / h);
  }
  return r;
}

RowBuilder d2_1d(int p, int n, double h, const std::function<std::size_t(int)>& at) {
  RowBuilder r;
  const double ih2 = 1.0 / (h * h);
  if (p > 0 && p < n - 1) {
    r.add(at(p - 1), ih2);
    r.add(at(p), -2.0 * ih2);
    r.add(at(p + 1), ih2);
  } else {
    const int s = p == 0 ? 1 : -1;
    r.add(at(p), 2.0 * ih2);
    r.add(at(p + s), -5.0 * ih2);
    r.add(at(p + 2 * s), 4.0 * ih2);
    r.add(at(p + 3 * s), -1.0 * ih2);
  }
  return r;
}

Rows cartesian_rows(const Grid& g, std::size_t node) {
  const GridNode& nd = g.node(node);
  const int row = nd.ring;
  const int col = nd.col;
  const int n = g.n();
  const double h = g.h();
  auto along_x = [&](int c) { return g.cart_index(row, c); };
  auto along_y = [&](int r) { return g.cart_index(r, col); };

  Rows out;
  out[0] = d1_1d(col, n, h, along_x);
  out[1] = d1_1d(row, n, h, along_y);
  out[2] = d2_1d(col, n, h, along_x);
  out[4] = d2_1d(row, n, h, along_y);
  // mixed: tensor product of the two first-derivative operators
  const RowBuilder wy = d1_1d(row, n, h, [](int r) { return static_cast<std::size_t>(r); });
  for (const auto& ey : wy.finalize()) {
    const int r = static_cast<int>(ey.index);
    const RowBuilder wx = d1_1d(col, n, h, [&](int c) { return g.cart_index(r, c); });
    out[3].add_scaled(wx, ey.weight);
  }
  return out;
}

Rows polar_rows(const Grid& g, std::size_t node) {
  const GridNode& nd = g.node(node);
  const int j = nd.ring;
  const int i = nd.col;
  const int nr = g.nr();
  const int half = g.ntheta() / 2;
  const double dr = g.drho();
  const double dt = g.dtheta();
  const double a = g.domain().a();
  const double b = g.domain().b();
  const double rho = j == nr - 1 ? 1.0 : (j + 0.5) * dr;
  const double th = i * dt;
  const double c = std::cos(th);
  const double s = std::sin(th);

  // node at ring jj (negative rings are phantoms across the pole), column ii
  auto at = [&](int jj, int ii) -> std::size_t {
    if (jj < 0) return g.polar_index(-jj - 1, ii + half);
    return g.polar_index(jj, ii);
  };

  // Angular weights exact on the first Fourier mode (the linear part of u),
  // which keeps the 1/rho and 1/rho^2 factors near the pole from amplifying
  // the angular truncation error.
  const double w_t = 0.5 / std::sin(dt);
  const double w_tt = 1.0 / (2.0 - 2.0 * std::cos(dt));

  // u_theta on ring jj, as stencil
  auto theta_first = [&](int jj) {
    RowBuilder r;
    r.add(at(jj, i + 1), w_t);
    r.add(at(jj, i - 1), -w_t);
    return r;
  };

  RowBuilder pr, pt, prr, prt, ptt;
  pt = theta_first(j);
  ptt.add(at(j, i + 1), w_tt);
  ptt.add(at(j, i), -2.0 * w_tt);
  ptt.add(at(j, i - 1), w_tt);

  if (j < nr - 2) {
    // Fourth-order radial first differences: their truncation error is
    // divided by rho in the Cartesian Hessian, which would leave the rings
    // next to the pole first-order with the three-point formula.
    const double w1 = 8.0 / (12.0 * dr), w2 = 1.0 / (12.0 * dr);
    pr.add(at(j + 1, i), w1);
    pr.add(at(j - 1, i), -w1);
    pr.add(at(j + 2, i), -w2);
    pr.add(at(j - 2, i), w2);
    prr.add(at(j + 1, i), 1.0 / (dr * dr));
    prr.add(at(j, i), -2.0 / (dr * dr));
    prr.add(at(j - 1, i), 1.0 / (dr * dr));
    prt.add_scaled(theta_first(j + 1), w1);
    prt.add_scaled(theta_first(j - 1), -w1);
    prt.add_scaled(theta_first(j + 2), -w2);
    prt.add_scaled(theta_first(j - 2), w2);
  } else if (j < nr - 1) {
    pr.add(at(j + 1, i), 0.5 / dr);
    pr.add(at(j - 1, i), -0.5 / dr);
    prr.add(at(j + 1, i), 1.0 / (dr * dr));
    prr.add(at(j, i), -2.0 / (dr * dr));
    prr.add(at(j - 1, i), 1.0 / (dr * dr));
    prt.add_scaled(theta_first(j + 1), 0.5 / dr);
    prt.add_scaled(theta_first(j - 1), -0.5 / dr);
  } else {
    pr.add(at(j, i), 1.5 / dr);
    pr.add(at(j - 1, i), -2.0 / dr);
    pr.add(at(j - 2, i), 0.5 / dr);
    prr.add(at(j, i), 2.0 / (dr * dr));
    prr.add(at(j - 1, i), -5.0 / (dr * dr));
    prr.add(at(j - 2, i), 4.0 / (dr * dr));
    prr.add(at(j - 3, i), -1.0 / (dr * dr));
    prt.add_scaled(theta_first(j), 1.5 / dr);
    prt.add_scaled(theta_first(j - 1), -2.0 / dr);
    prt.add_scaled(theta_first(j - 2), 0.5 / dr);
  }

  // inverse Jacobian of x = (a rho cos, b rho sin): dq_a / dx_m
  const double j00 = c / a;
  const double j01 = s / b;
  const double j10 = -s / (a * rho);
  const double j11 = c / (b * rho);

  Rows out;
  RowBuilder& ux = out[0];
  RowBuilder& uy = out[1];
  ux.add_scaled(pr, j00);
  ux.add_scaled(pt, j10);
  uy.add_scaled(pr, j01);
  uy.add_scaled(pt, j11);

  // second derivatives of the map
  const double x_rt = -a * s, y_rt = b * c;
  const double x_tt = -a * rho * c, y_tt = -b * rho * s;
  RowBuilder k_rr = prr;
  RowBuilder k_rt = prt;
  k_rt.add_scaled(ux, -x_rt);
  k_rt.add_scaled(uy, -y_rt);
  RowBuilder k_tt = ptt;
  k_tt.add_scaled(ux, -x_tt);
  k_tt.add_scaled(uy, -y_tt);

  out[2].add_scaled(k_rr, j00 * j00);
  out[2].add_scaled(k_rt, 2.0 * j00 * j10);
  out[2].add_scaled(k_tt, j10 * j10);
  out[3].add_scaled(k_rr, j00 * j01);
  out[3].add_scaled(k_rt, j00 * j11 + j10 * j01);
  out[3].add_scaled(k_tt, j10 * j11);
  out[4].add_scaled(k_rr, j01 * j01);
  out[4].add_scaled(k_rt, 2.0 * j01 * j11);
  out[4].add_scaled(k_tt, j11 * j11);
  return out;
}

void require_closed(const GridFn& u, const char* who) {
  if (!u.boundary_closed()) {
    std::ostringstream os;
    os << who << ": boundary values are not closed (apply the Neumann closure first)";
    throw StateError(os.str());
  }
}

}  // namespace

Stencil build_stencil(const Grid& grid) {
  Stencil st;
  for (int k = 0; k < kDerivCount; ++k) {
    st.offsets_[k].reserve(grid.size() + 1);
    st.offsets_[k].push_back(0);
  }
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Rows rows = grid.backend() == GridBackend::polar ? polar_rows(grid, node)
                                                           : cartesian_rows(grid, node);
    for (int k = 0; k < kDerivCount; ++k) {
      const auto entries = rows[k].finalize();
      st.entries_[k].insert(st.entries_[k].end(), entries.begin(), entries.end());
      st.offsets_[k].push_back(st.entries_[k].size());
    }
  }
  return st;
}

BoundaryClosure build_closure(const Grid& grid, const Stencil& stencil) {
  BoundaryClosure cl;
  for (std::size_t b : grid.boundary()) {
    const Point nu = grid.node(b).normal;
    RowBuilder rb;
    for (const auto& e : stencil.row(Deriv::x, b)) rb.add(e.index, nu.x * e.weight);
    for (const auto& e : stencil.row(Deriv::y, b)) rb.add(e.index, nu.y * e.weight);
    ClosureRow row;
    row.node = b;
    for (const auto& e : rb.finalize()) {
      if (e.index == b)
        row.self_weight = e.weight;
      else
        row.others.push_back(e);
    }
    if (!(row.self_weight > 0.0)) throw StateError("boundary closure: non-positive self weight");
    cl.rows.push_back(std::move(row));
  }
  return cl;
}

Discretization::Discretization(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), stencil_(build_stencil(*grid_)), closure_(build_closure(*grid_, stencil_)) {}

std::array<double, 3> hessian_at(const Discretization& disc, std::span<const double> u,
                                 std::size_t node) {
  const Stencil& st = disc.stencil();
  return {st.apply(Deriv::xx, node, u), st.apply(Deriv::xy, node, u), st.apply(Deriv::yy, node, u)};
}

std::vector<SymMatrix> hessian(const Discretization& disc, const GridFn& u) {
  require_closed(u, "hessian");
  std::vector<SymMatrix> out;
  out.reserve(u.size());
  for (std::size_t node = 0; node < u.size(); ++node) {
    const auto h = hessian_at(disc, u.values(), node);
    SymMatrix m(2);
    m.set(0, 0, h[0]);
    m.set(0, 1, h[1]);
    m.set(1, 1, h[2]);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::array<double, 2>> gradient(const Discretization& disc, const GridFn& u) {
  require_closed(u, "gradient");
  std::vector<std::array<double, 2>> out(u.size());
  for (std::size_t node = 0; node < u.size(); ++node)
    out[node] = {disc.stencil().apply(Deriv::x, node, u.values()),
                 disc.stencil().apply(Deriv::y, node, u.values())};
  return out;
}

double normal_derivative(const Discretization& disc, std::span<const double> u, std::size_t r) {
  const ClosureRow& row = disc.closure().rows[r];
  double s = row.self_weight * u[row.node];
  for (const auto& e : row.others) s += e.weight * u[e.index];
  return s;
}

namespace {

double phi_slope(const BoundaryFn& phi, Point x, double u) {
  const double h = 1e-6 * (1.0 + std::abs(u));
  return (phi(x, u + h) - phi(x, u - h)) / (2.0 * h);
}

// Solves self * u + rest - phi(x, u) = 0 for u.
double solve_boundary_value(const BoundaryFn& phi, Point x, double self, double rest, double guess,
                            const NeumannOptions& opt) {
  auto residual = [&](double u) { return self * u + rest - phi(x, u); };
  auto scale = [&](double u) {
    return std::abs(self * u) + std::abs(rest) + std::abs(phi(x, u)) + 1e-300;
  };

  double u = guess;
  double r = residual(u);
  if (!std::isfinite(r)) throw ConfigurationError("boundary function is not finite at the initial guess");

  // plain Newton first, run to roundoff so that large |u| does not loosen
  // the relation; falls back to bracketing when it stalls
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (r == 0.0) return u;
    const double slope = self - phi_slope(phi, x, u);
    if (!(slope > 0.0)) break;
    const double un = u - r / slope;
    const double rn = residual(un);
    if (!std::isfinite(rn) || std::abs(rn) >= std::abs(r)) {
      if (std::abs(r) <= opt.tolerance * scale(u)) return u;
      break;
    }
    const double du = std::abs(un - u);
    u = un;
    r = rn;
    if (du <= 1e-15 * (1.0 + std::abs(u))) return u;
  }
  if (std::abs(r) <= opt.tolerance * scale(u)) return u;

  // bracket: residual is increasing in u when phi_u <= 0
  double step = std::max(std::abs(r) / self, 1e-8 * (1.0 + std::abs(u)));
  double lo = u;
  double hi = u;
  bool bracketed = false;
  for (int it = 0; it < 200; ++it) {
    if (r > 0.0) {
      lo = u - step;
      if (residual(lo) < 0.0) { bracketed = true; break; }
      hi = lo;
    } else {
      hi = u + step;
      if (residual(hi) > 0.0) { bracketed = true; break; }
      lo = hi;
    }
    step *= 2.0;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "boundary relation u_nu = phi(x,u) could not be bracketed at (" << x.x << ", " << x.y
       << "); phi must be non-increasing in u";
    throw ConfigurationError(os.str(), "problem.phi");
  }
  if (r > 0.0) hi = u; else lo = u;

  u = 0.5 * (lo + hi);
  for (int it = 0; it < opt.max_iterations; ++it) {
    r = residual(u);
    if (std::abs(r) <= opt.tolerance * scale(u)) break;
    if (r > 0.0) hi = u; else lo = u;
    if (hi - lo <= 1e-16 * (1.0 + std::abs(u))) break;
    const double slope = self - phi_slope(phi, x, u);
    double next = slope > 0.0 ? u - r / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  return u;
}

}  // namespace

GridFn apply_neumann(const Discretization& disc, const GridFn& u, const BoundaryFn& phi,
                     const NeumannOptions& opt) {
  const Grid& g = disc.grid();
  GridFn out = u;
  auto& v = out.mutable_values();
  const auto& rows = disc.closure().rows;

  bool coupled = false;
  for (const auto& row : rows)
    for (const auto& e : row.others)
      if (g.node(e.index).kind == NodeKind::boundary) coupled = true;

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    double change = 0.0;
    double mag = 0.0;
    for (const auto& row : rows) {
      double rest = 0.0;
      for (const auto& e : row.others) rest += e.weight * v[e.index];
      const Point x = g.node(row.node).x;
      const double nv = solve_boundary_value(phi, x, row.self_weight, rest, v[row.node], opt);
      change = std::max(change, std::abs(nv - v[row.node]));
      mag = std::max(mag, std::abs(nv));
      v[row.node] = nv;
    }
    if (!coupled || change <= 1e-15 * (1.0 + mag)) break;
  }

  for (const auto& row : rows) {
    const Point x = g.node(row.node).x;
    if (phi_slope(phi, x, v[row.node]) > 1e-8) {
      std::ostringstream os;
      os << "boundary function is increasing in u at (" << x.x << ", " << x.y
         << "); the Neumann relation needs phi_u <= 0";
      throw ConfigurationError(os.str(), "problem.phi");
    }
  }
  out.mark_closed();
  return out;
}

double neumann_residual(const Discretization& disc, const GridFn& u, const BoundaryFn& phi) {
  const Grid& g = disc.grid();
  const auto& rows = disc.closure().rows;
  double worst = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double un = normal_derivative(disc, u.values(), r);
    const double p = phi(g.node(rows[r].node).x, u[rows[r].node]);
    double scale = std::abs(rows[r].self_weight * u[rows[r].node]) + std::abs(p) + 1.0;
    for (const auto& e : rows[r].others) scale += std::abs(e.weight * u[e.index]);
    worst = std::max(worst, std::abs(un - p) / scale);
  }
  return worst;
}

}  // namespace hqflow
