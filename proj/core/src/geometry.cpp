#include "hqflow/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hqflow/errors.hpp"

namespace hqflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {-0.8611363115940526, -0.3399810435848563,
                                            0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGlWeights = {0.3478548451374538, 0.6521451548625461,
                                              0.6521451548625461, 0.3478548451374538};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be positive and finite, got " << v;
    throw ArgumentError(os.str());
  }
}

// Closest point on the ellipse (x/e0)^2 + (y/e1)^2 = 1 to (y0, y1), with
// e0 >= e1 and y0, y1 >= 0. Root of the monotone secular function by
// Newton with a bisection safeguard.
Point project_first_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      auto secular = [&](double t) {
        const double r0 = e0 * y0 / (t + e0 * e0);
        const double r1 = e1 * y1 / (t + e1 * e1);
        return r0 * r0 + r1 * r1 - 1.0;
      };
      auto slope = [&](double t) {
        const double d0 = t + e0 * e0;
        const double d1 = t + e1 * e1;
        return -2.0 * (e0 * e0 * y0 * y0 / (d0 * d0 * d0) + e1 * e1 * y1 * y1 / (d1 * d1 * d1));
      };
      double lo = -e1 * e1 + e1 * y1;
      double hi = -e1 * e1 + std::hypot(e0 * y0, e1 * y1);
      double t = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double f = secular(t);
        if (f > 0.0) lo = t; else hi = t;
        if (f == 0.0 || hi - lo <= 1e-16 * std::max(1.0, std::abs(t))) break;
        double next = t - f / slope(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-17 * std::max(1.0, std::abs(t))) {
          t = next;
          break;
        }
        t = next;
      }
      return {e0 * e0 * y0 / (t + e0 * e0), e1 * e1 * y1 / (t + e1 * e1)};
    }
    return {0.0, e1};
  }
  const double numer = e0 * y0;
  const double denom = e0 * e0 - e1 * e1;
  if (numer < denom) {
    const double xde0 = numer / denom;
    return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
  }
  return {e0, 0.0};
}

}  // namespace

Domain Domain::disk(double radius) {
  require_positive(radius, "disk radius");
  return {DomainKind::disk, radius, radius};
}

Domain Domain::ellipse(double a, double b) {
  require_positive(a, "ellipse semi-axis a");
  require_positive(b, "ellipse semi-axis b");
  return {DomainKind::ellipse, a, b};
}

Domain Domain::square(double half_width) {
  require_positive(half_width, "square half-width");
  return {DomainKind::square, half_width, half_width};
}

std::string Domain::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DomainKind::disk: os << "disk(R=" << a_ << ")"; break;
    case DomainKind::ellipse: os << "ellipse(a=" << a_ << ",b=" << b_ << ")"; break;
    case DomainKind::square: os << "square(L=" << a_ << ")"; break;
  }
  return os.str();
}

Point project_to_boundary(const Domain& dom, Point x) {
  switch (dom.kind()) {
    case DomainKind::disk: {
      const double r = std::hypot(x.x, x.y);
      if (r == 0.0) return {dom.a(), 0.0};
      return {dom.a() * x.x / r, dom.a() * x.y / r};
    }
    case DomainKind::ellipse: {
      const bool swap = dom.a() < dom.b();
      const double e0 = swap ? dom.b() : dom.a();
      const double e1 = swap ? dom.a() : dom.b();
      const double px = swap ? x.y : x.x;
      const double py = swap ? x.x : x.y;
      Point q = project_first_quadrant(e0, e1, std::abs(px), std::abs(py));
      q.x = std::copysign(q.x, px);
      q.y = std::copysign(q.y, py);
      return swap ? Point{q.y, q.x} : q;
    }
    case DomainKind::square: {
      const double L = dom.a();
      const double cx = std::clamp(x.x, -L, L);
      const double cy = std::clamp(x.y, -L, L);
      if (cx != x.x || cy != x.y) return {cx, cy};
      // inside: push to the nearest face
      if (L - std::abs(x.x) <= L - std::abs(x.y)) return {std::copysign(L, x.x), x.y};
      return {x.x, std::copysign(L, x.y)};
    }
  }
  return x;
}

double distance(const Domain& dom, Point x) {
  switch (dom.kind()) {
    case DomainKind::disk:
      return dom.a() - std::hypot(x.x, x.y);
    case DomainKind::ellipse: {
      const Point q = project_to_boundary(dom, x);
      const double d = std::hypot(x.x - q.x, x.y - q.y);
      const double level = (x.x / dom.a()) * (x.x / dom.a()) + (x.y / dom.b()) * (x.y / dom.b());
      return level <= 1.0 ? d : -d;
    }
    case DomainKind::square: {
      const double L = dom.a();
      const double dx = L - std::abs(x.x);
      const double dy = L - std::abs(x.y);
      if (dx >= 0.0 && dy >= 0.0) return std::min(dx, dy);
      return -std::hypot(std::min(dx, 0.0), std::min(dy, 0.0));
    }
  }
  return 0.0;
}

Point normal(const Domain& dom, Point x) {
  if (std::abs(distance(dom, x)) > 1e-10) {
    std::ostringstream os;
    os << "normal: point (" << x.x << ", " << x.y << ") is not on the boundary of "
       << dom.describe();
    throw ArgumentError(os.str());
  }
  switch (dom.kind()) {
    case DomainKind::disk: {
      const double r = std::hypot(x.x, x.y);
      return {x.x / r, x.y / r};
    }
    case DomainKind::ellipse: {
      const double gx = x.x / (dom.a() * dom.a());
      const double gy = x.y / (dom.b() * dom.b());
      const double g = std::hypot(gx, gy);
      return {gx / g, gy / g};
    }
    case DomainKind::square: {
      const double L = dom.a();
      const double tol = 1e-10;
      const bool on_x = std::abs(x.x) >= L - tol;
      const bool on_y = std::abs(x.y) >= L - tol;
      if (on_x && on_y) {
        const double s = 1.0 / std::sqrt(2.0);
        return {std::copysign(s, x.x), std::copysign(s, x.y)};
      }
      if (on_x) return {std::copysign(1.0, x.x), 0.0};
      return {0.0, std::copysign(1.0, x.y)};
    }
  }
  return {};
}

double boundary_integral(const Domain& dom, const ScalarOnPoints& g, int panels) {
  if (panels < 4) throw ArgumentError("boundary_integral: need at least 4 panels");
  if (dom.kind() == DomainKind::square) {
    const double L = dom.a();
    const int per_side = std::max(1, panels / 4);
    const double h = 2.0 * L / per_side;
    double sum = 0.0;
    // counter-clockwise sides, each parameterized from -L to L
    const std::array<std::array<double, 4>, 4> sides = {{
        {-L, -L, 1.0, 0.0}, {L, -L, 0.0, 1.0}, {L, L, -1.0, 0.0}, {-L, L, 0.0, -1.0}}};
    for (const auto& s : sides) {
      double side = 0.0;
      for (int i = 0; i <= per_side; ++i) {
        const double w = (i == 0 || i == per_side) ? 0.5 : 1.0;
        side += w * g({s[0] + s[2] * i * h, s[1] + s[3] * i * h});
      }
      sum += side * h;
    }
    return sum;
  }
  const double a = dom.a();
  const double b = dom.b();
  const double dt = kTwoPi / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double t = i * dt;
    const double c = std::cos(t);
    const double s = std::sin(t);
    sum += g({a * c, b * s}) * std::hypot(a * s, b * c);
  }
  return sum * dt;
}

double area_integral(const Domain& dom, const ScalarOnPoints& g, int panels) {
  if (panels < 1) throw ArgumentError("area_integral: need at least 1 panel");
  if (dom.kind() == DomainKind::square) {
    const double L = dom.a();
    const double h = 2.0 * L / panels;
    double sum = 0.0;
    for (int px = 0; px < panels; ++px)
      for (int qx = 0; qx < 4; ++qx) {
        const double x = -L + (px + 0.5 * (kGlNodes[qx] + 1.0)) * h;
        for (int py = 0; py < panels; ++py)
          for (int qy = 0; qy < 4; ++qy) {
            const double y = -L + (py + 0.5 * (kGlNodes[qy] + 1.0)) * h;
            sum += kGlWeights[qx] * kGlWeights[qy] * g({x, y});
          }
      }
    return sum * 0.25 * h * h;
  }
  const double a = dom.a();
  const double b = dom.b();
  const int nth = 4 * panels;
  const double dth = kTwoPi / nth;
  const double dr = 1.0 / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < 4; ++q) {
      const double rho = (p + 0.5 * (kGlNodes[q] + 1.0)) * dr;
      double ring = 0.0;
      for (int i = 0; i < nth; ++i) {
        const double t = i * dth;
        ring += g({a * rho * std::cos(t), b * rho * std::sin(t)});
      }
      sum += kGlWeights[q] * 0.5 * dr * rho * ring * dth;
    }
  return sum * a * b;
}

// ------------------------------------------------------------------ Grid

std::size_t Grid::polar_index(int ring, int col) const noexcept {
  const int c = ((col % ntheta_) + ntheta_) % ntheta_;
  return static_cast<std::size_t>(ring) * ntheta_ + c;
}

std::string Grid::describe() const {
  std::ostringstream os;
  if (backend_ == GridBackend::polar)
    os << "polar " << nr_ << "x" << ntheta_ << " on " << domain_.describe();
  else
    os << "cartesian " << n_ << "x" << n_ << " on " << domain_.describe();
  return os.str();
}

Grid build_grid(const Domain& dom, const GridResolution& res) {
  Grid g(dom);
  if (dom.kind() == DomainKind::square) {
    if (res.n < 8) {
      std::ostringstream os;
      os << "cartesian grid needs n >= 8, got " << res.n;
      throw ArgumentError(os.str());
    }
    g.backend_ = GridBackend::cartesian;
    g.n_ = res.n;
    const double L = dom.a();
    g.h_ = 2.0 * L / (res.n - 1);
    g.h_min_ = g.h_;
    g.h_max_ = g.h_;
    g.nodes_.reserve(static_cast<std::size_t>(res.n) * res.n);
    for (int row = 0; row < res.n; ++row)
      for (int col = 0; col < res.n; ++col) {
        GridNode nd;
        nd.x = {col == res.n - 1 ? L : -L + col * g.h_, row == res.n - 1 ? L : -L + row * g.h_};
        nd.ring = row;
        nd.col = col;
        const bool edge = row == 0 || col == 0 || row == res.n - 1 || col == res.n - 1;
        if (edge) {
          nd.kind = NodeKind::boundary;
          nd.normal = normal(dom, nd.x);
          nd.weight = g.h_;
        }
        g.nodes_.push_back(nd);
      }
  } else {
    if (res.nr < 4 || res.ntheta < 8 || res.ntheta % 2 != 0) {
      std::ostringstream os;
      os << "polar grid needs nr >= 4 and an even ntheta >= 8, got " << res.nr << "x"
         << res.ntheta;
      throw ArgumentError(os.str());
    }
    g.backend_ = GridBackend::polar;
    g.nr_ = res.nr;
    g.ntheta_ = res.ntheta;
    g.drho_ = 1.0 / (res.nr - 0.5);
    g.dtheta_ = kTwoPi / res.ntheta;
    const double amin = std::min(dom.a(), dom.b());
    const double amax = std::max(dom.a(), dom.b());
    g.h_min_ = std::min(amin * g.drho_, 0.5 * g.drho_ * amin * g.dtheta_);
    g.h_max_ = std::max(amax * g.drho_, amax * g.dtheta_);
    g.h_ = g.h_max_;
    g.nodes_.reserve(static_cast<std::size_t>(res.nr) * res.ntheta);
    for (int j = 0; j < res.nr; ++j) {
      const bool outer = j == res.nr - 1;
      const double rho = outer ? 1.0 : (j + 0.5) * g.drho_;
      for (int i = 0; i < res.ntheta; ++i) {
        const double t = i * g.dtheta_;
        const double c = std::cos(t);
        const double s = std::sin(t);
        GridNode nd;
        nd.x = {dom.a() * rho * c, dom.b() * rho * s};
        nd.ring = j;
        nd.col = i;
        if (outer) {
          nd.kind = NodeKind::boundary;
          const double nx = dom.b() * c;
          const double ny = dom.a() * s;
          const double nn = std::hypot(nx, ny);
          nd.normal = {nx / nn, ny / nn};
          nd.weight = std::hypot(dom.a() * s, dom.b() * c) * g.dtheta_;
        }
        g.nodes_.push_back(nd);
      }
    }
  }
  for (std::size_t i = 0; i < g.nodes_.size(); ++i)
    (g.nodes_[i].kind == NodeKind::interior ? g.interior_ : g.boundary_).push_back(i);
  return g;
}

// ---------------------------------------------------------------- GridFn

GridFn::GridFn(std::shared_ptr<const Grid> grid, double fill)
    : grid_(std::move(grid)), values_(grid_->size(), fill) {}

GridFn GridFn::sample(std::shared_ptr<const Grid> grid, const ScalarOnPoints& g) {
  GridFn out(std::move(grid));
  for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] = g(out.grid_->node(i).x);
  out.closed_ = true;
  return out;
}

bool GridFn::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFn::interpolate(Point p) const {
  const Grid& g = *grid_;
  if (g.backend() == GridBackend::cartesian) {
    const double L = g.domain().a();
    const double sx = std::clamp((p.x + L) / g.h(), 0.0, static_cast<double>(g.n() - 1));
    const double sy = std::clamp((p.y + L) / g.h(), 0.0, static_cast<double>(g.n() - 1));
    const int c0 = std::min(static_cast<int>(sx), g.n() - 2);
    const int r0 = std::min(static_cast<int>(sy), g.n() - 2);
    const double fx = sx - c0;
    const double fy = sy - r0;
    const double v00 = values_[g.cart_index(r0, c0)];
    const double v01 = values_[g.cart_index(r0, c0 + 1)];
    const double v10 = values_[g.cart_index(r0 + 1, c0)];
    const double v11 = values_[g.cart_index(r0 + 1, c0 + 1)];
    return (1 - fy) * ((1 - fx) * v00 + fx * v01) + fy * ((1 - fx) * v10 + fx * v11);
  }

  const double xa = p.x / g.domain().a();
  const double yb = p.y / g.domain().b();
  const double rho = std::hypot(xa, yb);
  double theta = std::atan2(yb, xa);
  if (theta < 0.0) theta += kTwoPi;

  const double st = theta / g.dtheta();
  const int i0 = static_cast<int>(std::floor(st)) % g.ntheta();
  const double ft = st - std::floor(st);

  auto ring_value = [&](int j, int i) -> double {
    if (j < 0) return values_[g.polar_index(0, i + g.ntheta() / 2)];  // phantom across the pole
    return values_[g.polar_index(j, i)];
  };
  const double sr = std::clamp(rho / g.drho() - 0.5, -1.0, static_cast<double>(g.nr() - 1));
  int j0 = static_cast<int>(std::floor(sr));
  j0 = std::min(j0, g.nr() - 2);
  const double fr = sr - j0;
  const double lo = (1 - ft) * ring_value(j0, i0) + ft * ring_value(j0, i0 + 1);
  const double hi = (1 - ft) * ring_value(j0 + 1, i0) + ft * ring_value(j0 + 1, i0 + 1);
  return (1 - fr) * lo + fr * hi;
}

double oscillation(std::span<const double> values, const std::vector<std::size_t>& subset) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (subset.empty()) {
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  } else {
    for (std::size_t i : subset) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
  }
  return values.empty() ? 0.0 : hi - lo;
}

}  // namespace hqflow
