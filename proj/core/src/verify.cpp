#include "hqflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hqflow/oracle.hpp"
#include "hqflow/symmfunc.hpp"

namespace hqflow {

double faulty_sigma(std::span<const double> lam, int m) {
  const int n = static_cast<int>(lam.size());
  if (m < 0 || m > n) return 0.0;
  std::vector<double> e(m + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double x = i == n - 1 ? -lam[i] : lam[i];
    for (int j = std::min(i + 1, m); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e[m];
}

double inequality_margin(double lhs, double rhs) {
  return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.ok(); });
}

namespace {

// sigma routed through the (possibly faulty) shadow implementation.
struct Shadow {
  SigmaFn fn;

  double operator()(std::span<const double> lam, int m) const {
    if (m < 0 || m > static_cast<int>(lam.size())) return 0.0;
    return fn(lam, m);
  }
  double omit(std::span<const double> lam, int m, int i) const {
    std::vector<double> r;
    r.reserve(lam.size());
    for (int j = 0; j < static_cast<int>(lam.size()); ++j)
      if (j != i) r.push_back(lam[j]);
    return (*this)(r, m);
  }
  // d(sigma_k/sigma_l)/d lam_i
  std::vector<double> dq(std::span<const double> lam, int k, int l) const {
    const double sk = (*this)(lam, k), sl = (*this)(lam, l);
    std::vector<double> g(lam.size());
    for (int i = 0; i < static_cast<int>(lam.size()); ++i)
      g[i] = (omit(lam, k - 1, i) * sl - sk * omit(lam, l - 1, i)) / (sl * sl);
    return g;
  }
};

std::vector<double> abs_of(std::span<const double> lam) {
  std::vector<double> a(lam.begin(), lam.end());
  for (auto& x : a) x = std::abs(x);
  return a;
}

// Eigenvalues of a symmetric matrix of any size >= 0.
std::vector<double> spectrum(const SymMatrix& a) {
  if (a.dim() == 0) return {};
  if (a.dim() == 1) return {a(0, 0)};
  return eigen_sym(a).values.values();
}

SymMatrix delete_row_col(const SymMatrix& a, int i) {
  SymMatrix s(a.dim() - 1);
  for (int r = 0, rr = 0; r < a.dim(); ++r) {
    if (r == i) continue;
    for (int c = 0, cc = 0; c < a.dim(); ++c) {
      if (c == i) continue;
      s.set(rr, cc, a(r, c));
      ++cc;
    }
    ++rr;
  }
  return s;
}

void sort_desc(std::vector<double>& v) { std::sort(v.begin(), v.end(), std::greater<>()); }

class Recorder {
 public:
  Recorder(std::string name, std::string kind, double tol) {
    r_.name = std::move(name);
    r_.kind = std::move(kind);
    r_.tolerance = tol;
    r_.worst_margin = std::numeric_limits<double>::infinity();
  }
  // One trial may contribute several margins; it passes iff all do.
  void begin() { trial_worst_ = std::numeric_limits<double>::infinity(); }
  void margin(double m) {
    if (std::isnan(m)) m = -std::numeric_limits<double>::infinity();
    trial_worst_ = std::min(trial_worst_, m);
  }
  void identity(double lhs, double rhs, double scale) {
    margin(-std::abs(lhs - rhs) / std::max(1e-300, scale));
  }
  void inequality(double lhs, double rhs) { margin(inequality_margin(lhs, rhs)); }
  void end() {
    ++r_.trials;
    if (trial_worst_ >= -r_.tolerance) ++r_.passed;
    r_.worst_margin = std::min(r_.worst_margin, trial_worst_);
  }
  PropertyResult result() const {
    PropertyResult r = r_;
    if (r.trials == 0) r.worst_margin = 0.0;
    return r;
  }

 private:
  PropertyResult r_;
  double trial_worst_ = 0.0;
};

// Independent stream per property so adding one does not shift the others.
SampleRng property_rng(std::uint64_t seed, int index) {
  return SampleRng(RngSpec{seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(index + 1))});
}

int dim_for(long t, int lo, int hi) { return lo + static_cast<int>(t % (hi - lo + 1)); }

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
  if (opt.trials < 0) throw ArgumentError("verify: trials must be nonnegative");
  if (opt.n_min < 2 || opt.n_max > 12 || opt.n_min > opt.n_max)
    throw ArgumentError("verify: need 2 <= n_min <= n_max <= 12");
  VerifyReport rep;
  rep.seed = opt.seed;
  rep.trials = opt.trials;
  rep.inject_fault = opt.inject_fault;
  if (opt.trials == 0) rep.warnings.emplace_back("trials = 0: every property passes vacuously");

  const Shadow sig{opt.inject_fault ? SigmaFn(faulty_sigma)
                                    : SigmaFn([](std::span<const double> l, int m) {
                                        return sigma(l, m);
                                      })};
  const double itol = opt.identity_tol, qtol = opt.inequality_tol;
  const long T = opt.trials;
  const int lo = opt.n_min, hi = opt.n_max;
  int index = 0;

  auto random_box = [](int n, SampleRng& rng) {
    std::vector<double> lam(n);
    for (auto& x : lam) x = rng.box();
    return lam;
  };

  // ---- algebraic identities on unconstrained lists

  {
    Recorder r("sigma_matches_subset_sum", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const auto lam = random_box(n, rng);
      r.begin();
      for (int m = 0; m <= n; ++m)
        r.identity(sig(lam, m), sigma_brute(lam, m), std::max(1.0, sigma_brute(abs_of(lam), m)));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("deletion_expansion", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const auto lam = random_box(n, rng);
      const auto a = abs_of(lam);
      r.begin();
      for (int k = 1; k <= n; ++k)
        for (int i = 0; i < n; ++i)
          r.identity(sig(lam, k), sig.omit(lam, k, i) + lam[i] * sig.omit(lam, k - 1, i),
                     std::max(1.0, sigma_brute(a, k)));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("weighted_deleted_sum", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const auto lam = random_box(n, rng);
      const auto a = abs_of(lam);
      r.begin();
      for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += lam[i] * sig.omit(lam, k - 1, i);
        r.identity(s, k * sig(lam, k), std::max(1.0, k * sigma_brute(a, k)));
      }
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("deleted_sum", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const auto lam = random_box(n, rng);
      const auto a = abs_of(lam);
      r.begin();
      for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += sig.omit(lam, k, i);
        r.identity(s, (n - k) * sig(lam, k), std::max(1.0, n * sigma_brute(a, k)));
      }
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    // library fast paths for deleted functions against literal deletion
    Recorder r("deleted_fast_path_matches", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const auto lam = random_box(n, rng);
      const auto a = abs_of(lam);
      const double scale = std::max(1.0, sigma_brute(a, n / 2));
      r.begin();
      for (int i = 0; i < n; ++i) {
        for (int m = 0; m <= n - 1; ++m)
          r.identity(sigma_omit(lam, m, i), sig.omit(lam, m, i), scale);
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          std::vector<double> rest;
          for (int p = 0; p < n; ++p)
            if (p != i && p != j) rest.push_back(lam[p]);
          for (int m = 0; m <= n - 2; ++m)
            r.identity(sigma_omit2(lam, m, i, j), sig(rest, m), scale);
        }
      }
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("quotient_gradient_matches", "identity", itol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      const int l = rng.uniform_int(0, k - 1);
      const auto lam = sample_gamma_k(n, k, rng);
      const auto a = abs_of(lam);
      const QuotientIndices q{k, l, n};
      const auto fast = d_quotient(lam, q);
      const auto ref = sig.dq(lam, k, l);
      const double sl = sig(lam, l);
      r.begin();
      for (int i = 0; i < n; ++i) {
        const double scale =
            (sig.omit(a, k - 1, i) * sigma_brute(a, l) + sigma_brute(a, k) * sig.omit(a, l - 1, i)) /
            (sl * sl);
        r.identity(fast[i], ref[i], scale);
      }
      r.end();
    }
    rep.properties.push_back(r.result());
  }

  // ---- sorted-spectrum inequalities on Gamma_k

  {
    Recorder r("deleted_sigma_ordering", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      auto lam = sample_gamma_k(n, k, rng);
      sort_desc(lam);
      r.begin();
      r.margin(sig.omit(lam, k - 1, 0) > 0.0 ? inequality_margin(sig.omit(lam, k - 1, 0), 0.0)
                                             : -std::numeric_limits<double>::infinity());
      for (int i = 0; i + 1 < n; ++i) r.inequality(sig.omit(lam, k - 1, i + 1), sig.omit(lam, k - 1, i));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("top_product_bound", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      auto lam = sample_gamma_k(n, k, rng);
      sort_desc(lam);
      double prod = 1.0;
      for (int i = 0; i < k; ++i) prod *= lam[i];
      r.begin();
      r.margin(lam[k - 1] > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
      r.inequality(binomial(n, k) * prod, sig(lam, k));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("largest_entry_deleted_bound", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      auto lam = sample_gamma_k(n, k, rng);
      sort_desc(lam);
      r.begin();
      r.inequality(lam[0] * sig.omit(lam, k - 1, 0), static_cast<double>(k) / n * sig(lam, k));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder r("newton_maclaurin", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      const auto lam = sample_gamma_k(n, k, rng);
      std::vector<double> nrm(k + 1);
      for (int m = 0; m <= k; ++m) nrm[m] = sig(lam, m) / binomial(n, m);
      r.begin();
      for (int l = 0; l < k; ++l)
        for (int rr = 1; rr <= k; ++rr)
          for (int s = 0; s < rr && s <= l; ++s) {
            const double lhs = std::pow(nrm[k] / nrm[l], 1.0 / (k - l));
            const double rhs = std::pow(nrm[rr] / nrm[s], 1.0 / (rr - s));
            r.inequality(rhs, lhs);
          }
      r.end();
    }
    rep.properties.push_back(r.result());
  }

  // ---- a negative entry placed first

  auto has_negative = [](std::span<const double> l) {
    return *std::min_element(l.begin(), l.end()) < 0.0;
  };
  auto share_coeff = [](int n, int k, int l) {
    return static_cast<double>(n) / k * (k - l) / (n - l) / (n - k + 1);
  };

  {
    Recorder rg("negative_entry_deleted_growth", "inequality", qtol);
    Recorder rd("negative_entry_derivative_share", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n - 1);
      const int l = rng.uniform_int(0, k - 1);
      auto lam = sample_gamma_k(n, k, rng, has_negative);
      std::iter_swap(lam.begin(), std::min_element(lam.begin(), lam.end()));
      rg.begin();
      for (int m = 0; m <= k; ++m) rg.inequality(sig.omit(lam, m, 0), sig(lam, m));
      rg.end();
      const auto g = sig.dq(lam, k, l);
      double sum = 0.0;
      for (double x : g) sum += x;
      rd.begin();
      rd.inequality(g[0], share_coeff(n, k, l) * sum);
      rd.end();
    }
    rep.properties.push_back(rg.result());
    rep.properties.push_back(rd.result());
  }

  // ---- arrow matrices: a_11 < 0, lower-right block diagonal

  {
    Recorder rs("arrow_matrix_derivative_share", "inequality", qtol);
    Recorder rt("arrow_matrix_trace_bound", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n - 1);
      const int l = rng.uniform_int(0, k - 1);
      SymMatrix a(n);
      std::vector<double> lam;
      for (long tries = 0;; ++tries) {
        if (tries >= 1'000'000)
          throw SamplingError("verify: no admissible arrow matrix after 10^6 draws");
        a = SymMatrix(n);
        a.set(0, 0, -rng.uniform(0.0, 1.0));
        if (!(a(0, 0) < 0.0)) continue;
        for (int j = 1; j < n; ++j) {
          a.set(j, j, rng.box());
          a.set(0, j, rng.uniform(-0.5, 0.5));
        }
        lam = spectrum(a);
        if (in_gamma_k(lam, k)) break;
      }
      const double sk = sig(lam, k), sl = sig(lam, l);
      std::vector<double> g(n);
      for (int i = 0; i < n; ++i) {
        const auto sub = spectrum(delete_row_col(a, i));
        g[i] = (sig(sub, k - 1) * sl - sk * sig(sub, l - 1)) / (sl * sl);
      }
      double sum = 0.0;
      for (double x : g) sum += x;
      rs.begin();
      rs.inequality(g[0], share_coeff(n, k, l) * sum);
      rs.end();
      rt.begin();
      rt.inequality(sum, static_cast<double>(k - l) / k / binomial(n, l) *
                             std::pow(-a(0, 0), k - l - 1));
      rt.end();
    }
    rep.properties.push_back(rs.result());
    rep.properties.push_back(rt.result());
  }

  // ---- pinched spectra: lam_1 > 0, rest sorted descending with lam_n < 0

  {
    Recorder ro("pinched_deleted_bound", "inequality", qtol);
    Recorder rd("pinched_derivative_share", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    const int plo = std::max(lo, 3);
    for (long t = 0; t < T && plo <= hi; ++t) {
      const int n = dim_for(t, plo, hi);
      const int k = rng.uniform_int(2, n - 1);
      const int l = rng.uniform_int(0, k - 1);
      auto raw = sample_gamma_k(n, k, rng, has_negative);
      std::vector<int> pos;
      for (int i = 0; i < n; ++i)
        if (raw[i] > 0.0) pos.push_back(i);
      const int pick = pos[rng.uniform_int(0, static_cast<int>(pos.size()) - 1)];
      std::vector<double> lam{raw[pick]};
      for (int i = 0; i < n; ++i)
        if (i != pick) lam.push_back(raw[i]);
      std::sort(lam.begin() + 1, lam.end(), std::greater<>());
      // largest admissible constants, capped at 1
      const double delta = std::min(1.0, lam[0] / lam[1]);
      const double eps = std::min(1.0, -lam[n - 1] / lam[0]);
      const double c0 = std::min(eps * eps * delta * delta / (2.0 * (n - 2) * (n - 1)),
                                 eps * eps * delta / (4.0 * (n - 1)));
      ro.begin();
      for (int m = 0; m <= k - 1; ++m) ro.inequality(sig.omit(lam, m, 0), c0 * sig(lam, m));
      ro.end();
      const double c1 = share_coeff(n, k, l) * c0 * c0;
      const auto g = sig.dq(lam, k, l);
      double sum = 0.0;
      for (double x : g) sum += x;
      rd.begin();
      rd.inequality(g[0], c1 * sum);
      rd.end();
    }
    rep.properties.push_back(ro.result());
    rep.properties.push_back(rd.result());
  }

  // ---- matrix-level properties of the log quotient

  {
    Recorder r("log_quotient_concavity", "inequality", qtol);
    SampleRng rng = property_rng(opt.seed, index++);
    for (long t = 0; t < T; ++t) {
      const int n = dim_for(t, lo, hi);
      const int k = rng.uniform_int(1, n);
      const int l = rng.uniform_int(0, k - 1);
      const QuotientIndices q{k, l, n};
      const SymMatrix a = random_symmetric_with_spectrum(sample_gamma_k(n, k, rng), rng);
      const SymMatrix b = random_symmetric_with_spectrum(sample_gamma_k(n, k, rng), rng);
      const SymMatrix mid = (a + b) * 0.5;
      const double va = log_quotient_matrix(a, q).value;
      const double vb = log_quotient_matrix(b, q).value;
      const double vm = log_quotient_matrix(mid, q).value;
      r.begin();
      r.inequality(vm, 0.5 * (va + vb));
      r.end();
    }
    rep.properties.push_back(r.result());
  }
  {
    Recorder rf("derivative_matches_finite_difference", "identity", opt.fd_tol);
    Recorder rp("derivative_positive_definite", "inequality", 0.0);
    SampleRng rng = property_rng(opt.seed, index++);
    const int fhi = std::min(hi, opt.fd_n_max);
    for (long t = 0; t < T && lo <= fhi; ++t) {
      const int n = dim_for(t, lo, fhi);
      const int k = rng.uniform_int(1, n);
      const int l = rng.uniform_int(0, k - 1);
      const QuotientIndices q{k, l, n};
      // keep away from the cone boundary where the difference quotient degrades
      const auto lam = sample_gamma_k(n, k, rng, [k](std::span<const double> v) {
        for (int m = 1; m <= k; ++m)
          if (sigma_brute(v, m) < 1e-4 * sigma_brute(abs_of(v), m)) return false;
        return true;
      });
      const SymMatrix a = random_symmetric_with_spectrum(lam, rng);
      const SymMatrix F = log_quotient_matrix(a, q).F;
      const SymMatrix Ffd = fij_fd(a, q);
      double err = 0.0, big = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          err = std::max(err, std::abs(F(i, j) - Ffd(i, j)));
          big = std::max(big, std::abs(F(i, j)));
        }
      rf.begin();
      rf.margin(-err / big);
      rf.end();
      const auto ev = spectrum(F);
      const double mn = *std::min_element(ev.begin(), ev.end());
      const double mx = *std::max_element(ev.begin(), ev.end());
      rp.begin();
      rp.margin(mn > 0.0 ? mn / std::max(1.0, mx) : -std::numeric_limits<double>::infinity());
      rp.end();
    }
    rep.properties.push_back(rf.result());
    rep.properties.push_back(rp.result());
  }
  return rep;
}

}  // namespace hqflow
