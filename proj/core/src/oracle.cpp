#include "hqflow/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace hqflow {

double SampleRng::uniform(double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(engine_);
}

int SampleRng::uniform_int(int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(engine_);
}

double SampleRng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double sigma_brute(std::span<const double> lam, int m) {
  const int n = static_cast<int>(lam.size());
  if (n > 12) throw ArgumentError("sigma_brute: n = " + std::to_string(n) + " exceeds 12");
  if (m < 0 || m > n) throw ArgumentError("sigma_brute: order out of range");
  double sum = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != m) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= lam[i];
    sum += prod;
  }
  return sum;
}

namespace {

// Determinant by Gaussian elimination with partial pivoting.
double det(std::vector<double> a, int m) {
  double d = 1.0;
  for (int c = 0; c < m; ++c) {
    int p = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(a[r * m + c]) > std::abs(a[p * m + c])) p = r;
    if (a[p * m + c] == 0.0) return 0.0;
    if (p != c) {
      for (int j = 0; j < m; ++j) std::swap(a[p * m + j], a[c * m + j]);
      d = -d;
    }
    const double piv = a[c * m + c];
    d *= piv;
    for (int r = c + 1; r < m; ++r) {
      const double f = a[r * m + c] / piv;
      for (int j = c; j < m; ++j) a[r * m + j] -= f * a[c * m + j];
    }
  }
  return d;
}

// All sigma_1..sigma_k of A from principal minors; out[0] = 1.
std::vector<double> sigma_minors_all(const SymMatrix& a, int k) {
  const int n = a.dim();
  std::vector<double> out(k + 1, 0.0);
  out[0] = 1.0;
  std::vector<int> idx;
  std::vector<double> sub;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int m = std::popcount(mask);
    if (m > k) continue;
    idx.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    sub.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) sub[r * m + c] = a(idx[r], idx[c]);
    out[m] += det(sub, m);
  }
  return out;
}

// log(sigma_k/sigma_l), or NaN when some sigma_1..sigma_k <= 0.
double log_quotient_minors(const SymMatrix& a, const QuotientIndices& q) {
  const std::vector<double> s = sigma_minors_all(a, q.k);
  for (int i = 1; i <= q.k; ++i)
    if (!(s[i] > 0.0)) return std::nan("");
  return std::log(s[q.k] / s[q.l]);
}

}  // namespace

double sigma_minors(const SymMatrix& a, int m) {
  if (a.dim() > 12) throw ArgumentError("sigma_minors: n exceeds 12");
  if (m < 0 || m > a.dim()) throw ArgumentError("sigma_minors: order out of range");
  return sigma_minors_all(a, m)[m];
}

SymMatrix fij_fd(const SymMatrix& a, const QuotientIndices& q, double h) {
  const int n = a.dim();
  if (q.n != n) throw ArgumentError("fij_fd: matrix dimension does not match q.n");
  q.validate();
  if (n > 12) throw ArgumentError("fij_fd: n exceeds 12");
  if (!(h > 0.0)) throw ArgumentError("fij_fd: h must be positive");
  if (std::isnan(log_quotient_minors(a, q)))
    throw ArgumentError("fij_fd: A is not in Gamma_k");
  SymMatrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double w = i == j ? 1.0 : 0.5;
      for (double hh = h;; hh *= 0.1) {
        if (hh < 1e-12) throw ArgumentError("fij_fd: no step keeps A inside Gamma_k");
        SymMatrix ap = a, am = a;
        ap.add(i, j, w * hh);
        am.add(i, j, -w * hh);
        const double lp = log_quotient_minors(ap, q);
        const double lm = log_quotient_minors(am, q);
        if (std::isnan(lp) || std::isnan(lm)) continue;
        out.set(i, j, (lp - lm) / (2.0 * hh));
        break;
      }
    }
  }
  return out;
}

std::vector<double> sample_gamma_k(int n, int k, SampleRng& rng, const SampleFilter& filter) {
  if (n < 1 || n > 12) throw ArgumentError("sample_gamma_k: n must be in 1..12");
  if (k < 1 || k > n) throw ArgumentError("sample_gamma_k: k must be in 1..n");
  std::vector<double> lam(n), s(n + 1);
  for (long tries = 0; tries < 1'000'000; ++tries) {
    for (auto& x : lam) x = rng.box();
    // every sigma_m in one pass over the subsets
    std::fill(s.begin(), s.end(), 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      double prod = 1.0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) prod *= lam[i];
      s[std::popcount(mask)] += prod;
    }
    bool ok = true;
    for (int m = 1; m <= k && ok; ++m) ok = s[m] > 0.0;
    if (ok && (!filter || filter(lam))) return lam;
  }
  throw SamplingError("sample_gamma_k: 10^6 consecutive rejections (n = " + std::to_string(n) +
                      ", k = " + std::to_string(k) + ")");
}

Matrix random_orthogonal(int n, SampleRng& rng) {
  Matrix q(n);
  for (int c = 0; c < n; ++c) {
    for (;;) {
      std::vector<double> v(n);
      for (auto& x : v) x = rng.normal();
      // two Gram-Schmidt passes for orthogonality to roundoff
      for (int pass = 0; pass < 2; ++pass) {
        for (int p = 0; p < c; ++p) {
          double d = 0.0;
          for (int r = 0; r < n; ++r) d += v[r] * q(r, p);
          for (int r = 0; r < n; ++r) v[r] -= d * q(r, p);
        }
      }
      double nrm = 0.0;
      for (double x : v) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (nrm < 1e-8) continue;
      for (int r = 0; r < n; ++r) q(r, c) = v[r] / nrm;
      break;
    }
  }
  return q;
}

SymMatrix random_symmetric_with_spectrum(std::span<const double> lam, SampleRng& rng) {
  const int n = static_cast<int>(lam.size());
  const Matrix q = random_orthogonal(n, rng);
  SymMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += q(i, m) * lam[m] * q(j, m);
      a.set(i, j, s);
    }
  return a;
}

}  // namespace hqflow
