#include "hqflow/symmfunc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "hqflow/errors.hpp"

namespace hqflow {

// ---------------------------------------------------------------- Matrix

Matrix Matrix::identity(int n) {
  Matrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  Matrix out(n_);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < n_; ++k) {
      const double aik = (*this)(i, k);
      for (int j = 0; j < n_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

double Matrix::norm_inf() const noexcept {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

// ------------------------------------------------------------- SymMatrix

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m.set(static_cast<int>(i), static_cast<int>(i), d[i]);
  return m;
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  SymMatrix m(n);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) throw ArgumentError("SymMatrix: ragged rows");
    int j = 0;
    for (double v : row) m.a_[m.idx(i, j++)] = v;
    ++i;
  }
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c)
      if (m(r, c) != m(c, r)) throw ArgumentError("SymMatrix: input is not symmetric");
  return m;
}

SymMatrix SymMatrix::from_dense(const Matrix& d) {
  const int n = d.dim();
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m.set(i, i, d(i, i));
    for (int j = i + 1; j < n; ++j) m.set(i, j, 0.5 * (d(i, j) + d(j, i)));
  }
  return m;
}

SymMatrix SymMatrix::operator+(const SymMatrix& rhs) const {
  SymMatrix out(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
  return out;
}

SymMatrix SymMatrix::operator-(const SymMatrix& rhs) const {
  SymMatrix out(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
  return out;
}

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix out(*this);
  for (double& v : out.a_) v *= s;
  return out;
}

double SymMatrix::norm_inf() const noexcept {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = 0; j < n_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

double SymMatrix::norm_frobenius() const noexcept {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::trace() const noexcept {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, i);
  return s;
}

bool SymMatrix::all_finite() const noexcept {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Matrix SymMatrix::dense() const {
  Matrix d(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) d(i, j) = (*this)(i, j);
  return d;
}

// ------------------------------------------------------ symmetric functions

void QuotientIndices::validate() const {
  if (n < 1 || l < 0 || l >= k || k > n) {
    std::ostringstream os;
    os << "quotient indices require 0 <= l < k <= n, got k=" << k << " l=" << l << " n=" << n;
    throw ArgumentError(os.str());
  }
}

EigenList::EigenList(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw ArgumentError("EigenList needs at least 2 entries");
  for (double v : values_)
    if (!std::isfinite(v)) throw ArgumentError("EigenList entries must be finite");
  std::stable_sort(values_.begin(), values_.end(), std::greater<>());
}

namespace {

// Expansion of prod_{i != skip_a, skip_b} (1 + lam_i t), truncated at max_order.
std::vector<double> expand(std::span<const double> lam, int max_order, std::size_t skip_a,
                           std::size_t skip_b) {
  std::vector<double> e(static_cast<std::size_t>(max_order) + 1, 0.0);
  e[0] = 1.0;
  int used = 0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (i == skip_a || i == skip_b) continue;
    ++used;
    for (int j = std::min(used, max_order); j >= 1; --j) e[j] += lam[i] * e[j - 1];
  }
  return e;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

void check_index(std::span<const double> lam, int i, const char* who) {
  if (i < 0 || i >= static_cast<int>(lam.size())) {
    std::ostringstream os;
    os << who << ": index " << i << " out of range for n=" << lam.size();
    throw ArgumentError(os.str());
  }
}

[[noreturn]] void throw_inadmissible(const std::vector<double>& s, int k, double cone_eps) {
  for (int i = 1; i <= k; ++i) {
    if (!(s[i] > cone_eps)) {
      std::ostringstream os;
      os << "eigenvalues not in Gamma_" << k << ": sigma_" << i << " = " << s[i];
      throw AdmissibilityError(os.str(), i, s[i]);
    }
  }
  throw AdmissibilityError("eigenvalues not admissible", 0, 0.0);
}

}  // namespace

std::vector<double> sigma_all(std::span<const double> lam, int max_order) {
  if (max_order < 0 || max_order > static_cast<int>(lam.size()))
    throw ArgumentError("sigma_all: order out of range");
  return expand(lam, max_order, kNone, kNone);
}

double sigma(std::span<const double> lam, int m) {
  if (m < 0 || m > static_cast<int>(lam.size())) {
    std::ostringstream os;
    os << "sigma: order " << m << " out of range for n=" << lam.size();
    throw ArgumentError(os.str());
  }
  return expand(lam, m, kNone, kNone)[static_cast<std::size_t>(m)];
}

double sigma_omit(std::span<const double> lam, int m, int i) {
  check_index(lam, i, "sigma_omit");
  if (m < 0 || m > static_cast<int>(lam.size()) - 1)
    throw ArgumentError("sigma_omit: order out of range");
  return expand(lam, m, static_cast<std::size_t>(i), kNone)[static_cast<std::size_t>(m)];
}

double sigma_omit2(std::span<const double> lam, int m, int i, int j) {
  check_index(lam, i, "sigma_omit2");
  check_index(lam, j, "sigma_omit2");
  if (i == j) throw ArgumentError("sigma_omit2: indices must differ");
  if (m < 0 || m > static_cast<int>(lam.size()) - 2)
    throw ArgumentError("sigma_omit2: order out of range");
  return expand(lam, m, static_cast<std::size_t>(i), static_cast<std::size_t>(j))
      [static_cast<std::size_t>(m)];
}

bool in_gamma_k(std::span<const double> lam, int k, double cone_eps) {
  if (k < 1 || k > static_cast<int>(lam.size())) throw ArgumentError("in_gamma_k: k out of range");
  const auto s = expand(lam, k, kNone, kNone);
  for (int i = 1; i <= k; ++i)
    if (!(s[i] > cone_eps)) return false;
  return true;
}

double quotient(std::span<const double> lam, const QuotientIndices& q, double cone_eps) {
  q.validate();
  if (static_cast<int>(lam.size()) != q.n) throw ArgumentError("quotient: size mismatch with n");
  const auto s = expand(lam, q.k, kNone, kNone);
  for (int i = 1; i <= q.k; ++i)
    if (!(s[i] > cone_eps)) throw_inadmissible(s, q.k, cone_eps);
  return s[q.k] / s[q.l];
}

std::vector<double> d_quotient(std::span<const double> lam, const QuotientIndices& q,
                               double cone_eps) {
  q.validate();
  if (static_cast<int>(lam.size()) != q.n) throw ArgumentError("d_quotient: size mismatch with n");
  const auto s = expand(lam, q.k, kNone, kNone);
  for (int i = 1; i <= q.k; ++i)
    if (!(s[i] > cone_eps)) throw_inadmissible(s, q.k, cone_eps);

  const double sk = s[q.k];
  const double sl = s[q.l];
  std::vector<double> grad(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const auto del = expand(lam, q.k - 1, i, kNone);
    const double dk = del[q.k - 1];
    const double dl = q.l >= 1 ? del[q.l - 1] : 0.0;
    grad[i] = (dk * sl - sk * dl) / (sl * sl);
  }
  return grad;
}

// ---------------------------------------------------------- eigen solver

namespace {

SpectralDecomposition eigen_2x2(const SymMatrix& a) {
  const double p = a(0, 0);
  const double r = a(1, 1);
  const double c = a(0, 1);
  Matrix q(2);
  double l1 = p;
  double l2 = r;
  if (c == 0.0) {
    q(0, 0) = 1.0;
    q(1, 1) = 1.0;
    if (r > p) {
      std::swap(l1, l2);
      q(0, 0) = 0.0;
      q(1, 1) = 0.0;
      q(0, 1) = 1.0;
      q(1, 0) = 1.0;
    }
  } else {
    const double mean = 0.5 * (p + r);
    const double rad = std::hypot(0.5 * (p - r), c);
    l1 = mean + rad;
    l2 = mean - rad;
    const double theta = 0.5 * std::atan2(2.0 * c, p - r);
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    q(0, 0) = cs;
    q(1, 0) = sn;
    q(0, 1) = -sn;
    q(1, 1) = cs;
  }
  SpectralDecomposition out;
  out.vectors = q;
  out.values = EigenList({l1, l2});
  return out;
}

SpectralDecomposition eigen_jacobi(const SymMatrix& input) {
  const int n = input.dim();
  Matrix a = input.dense();
  Matrix v = Matrix::identity(n);
  const double scale = input.norm_frobenius();
  const double tol = 1e-13 * scale;

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 50 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });

  std::vector<double> lam(static_cast<std::size_t>(n));
  Matrix q(n);
  for (int c = 0; c < n; ++c) {
    lam[static_cast<std::size_t>(c)] = a(order[c], order[c]);
    for (int r = 0; r < n; ++r) q(r, c) = v(r, order[c]);
  }
  SpectralDecomposition out;
  out.values = EigenList(std::move(lam));
  out.vectors = q;
  return out;
}

}  // namespace

SpectralDecomposition eigen_sym(const SymMatrix& a) {
  if (a.dim() < 2) throw ArgumentError("eigen_sym: dimension must be >= 2");
  if (!a.all_finite()) throw ArgumentError("eigen_sym: non-finite matrix entries");
  return a.dim() == 2 ? eigen_2x2(a) : eigen_jacobi(a);
}

LogQuotient log_quotient_matrix(const SpectralDecomposition& eig, const QuotientIndices& q,
                                double cone_eps) {
  const auto lam = eig.values.span();
  const double value = quotient(lam, q, cone_eps);
  auto g = d_quotient(lam, q, cone_eps);
  for (double& gi : g) gi /= value;

  const int n = q.n;
  const Matrix& Q = eig.vectors;
  LogQuotient out;
  out.value = std::log(value);
  out.F = SymMatrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int c = 0; c < n; ++c) s += Q(i, c) * g[static_cast<std::size_t>(c)] * Q(j, c);
      out.F.set(i, j, s);
    }
  return out;
}

LogQuotient log_quotient_matrix(const SymMatrix& a, const QuotientIndices& q, double cone_eps) {
  if (a.dim() != q.n) throw ArgumentError("log_quotient_matrix: dimension mismatch");
  return log_quotient_matrix(eigen_sym(a), q, cone_eps);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace hqflow
