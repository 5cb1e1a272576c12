#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hqflow/errors.hpp"
#include "hqflow/oracle.hpp"
#include "hqflow/symmfunc.hpp"

using namespace hqflow;

namespace {

std::vector<double> without(std::vector<double> v, std::vector<int> drop) {
  std::sort(drop.rbegin(), drop.rend());
  for (int i : drop) v.erase(v.begin() + i);
  return v;
}

}  // namespace

TEST(Sigma, SmallExamples) {
  const std::vector<double> lam{1, 2, 3};
  EXPECT_DOUBLE_EQ(sigma(lam, 2), 11.0);
  EXPECT_DOUBLE_EQ(sigma(lam, 3), 6.0);
  EXPECT_DOUBLE_EQ(sigma(std::vector<double>{5, -7}, 0), 1.0);
}

TEST(Sigma, MatchesSubsetEnumeration) {
  SampleRng rng({11, -2.0, 2.0});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lam(8);
    for (double& x : lam) x = rng.box();
    for (int m = 0; m <= 8; ++m)
      EXPECT_NEAR(sigma(lam, m), sigma_brute(lam, m), 1e-12 * (1 + std::abs(sigma_brute(lam, m))));
  }
}

TEST(Sigma, OrderOutOfRangeThrows) {
  const std::vector<double> lam{1, 2, 3};
  EXPECT_THROW((void)sigma(lam, 4), ArgumentError);
  EXPECT_THROW((void)sigma(lam, -1), ArgumentError);
}

TEST(SigmaOmit, SmallExamples) {
  const std::vector<double> lam{1, 2, 3};
  EXPECT_DOUBLE_EQ(sigma_omit(lam, 1, 0), 5.0);
  EXPECT_DOUBLE_EQ(sigma_omit(lam, 2, 1), 3.0);
  EXPECT_DOUBLE_EQ(sigma_omit2(lam, 1, 0, 1), 3.0);
  EXPECT_DOUBLE_EQ(sigma_omit2(lam, 0, 0, 2), 1.0);
}

TEST(SigmaOmit, ExpansionIdentityAndOracle) {
  SampleRng rng({12, -1.0, 3.0});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> lam(6);
    for (double& x : lam) x = rng.box();
    for (int i = 0; i < 6; ++i) {
      for (int k = 1; k <= 6; ++k) {
        const double lhs = sigma(lam, k);
        const double expand =
            (k <= 5 ? sigma_omit(lam, k, i) : 0.0) + lam[i] * sigma_omit(lam, k - 1, i);
        EXPECT_NEAR(lhs, expand, 1e-12 * (1 + std::abs(lhs)));
      }
      for (int m = 0; m <= 5; ++m)
        EXPECT_NEAR(sigma_omit(lam, m, i), sigma_brute(without(lam, {i}), m), 1e-12 * 50);
      for (int j = 0; j < 6; ++j) {
        if (j == i) continue;
        for (int m = 0; m <= 4; ++m)
          EXPECT_NEAR(sigma_omit2(lam, m, i, j), sigma_brute(without(lam, {i, j}), m), 1e-12 * 50);
      }
    }
  }
}

TEST(SigmaOmit, EqualIndicesThrow) {
  const std::vector<double> lam{1, 2, 3};
  EXPECT_THROW((void)sigma_omit2(lam, 0, 1, 1), ArgumentError);
}

TEST(GammaK, Membership) {
  EXPECT_TRUE(in_gamma_k(std::vector<double>{1, 1, 1}, 3));
  EXPECT_FALSE(in_gamma_k(std::vector<double>{3, 1, -1}, 2));
  EXPECT_TRUE(in_gamma_k(std::vector<double>{1, 1, -0.1}, 2));
}

TEST(Quotient, SmallExamples) {
  EXPECT_DOUBLE_EQ(quotient(std::vector<double>{1, 1, 1}, {2, 1, 3}), 1.0);
  EXPECT_DOUBLE_EQ(quotient(std::vector<double>{1, 2}, {2, 0, 2}), 2.0);
}

TEST(Quotient, OutsideConeReportsFailingOrder) {
  try {
    (void)quotient(std::vector<double>{3, 1, -1}, {2, 1, 3});
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.failing_order(), 2);
    EXPECT_DOUBLE_EQ(e.failing_value(), -1.0);
  }
}

TEST(Quotient, InvalidIndicesThrow) {
  EXPECT_THROW((void)quotient(std::vector<double>{1, 2}, {2, 2, 2}), ArgumentError);
  EXPECT_THROW((void)quotient(std::vector<double>{1, 2}, {3, 0, 2}), ArgumentError);
}

TEST(Quotient, NewtonMaclaurinBound) {
  SampleRng rng({13, -1.0, 3.0});
  const int n = 5;
  auto mean = [&](const std::vector<double>& lam, int m) { return sigma(lam, m) / binomial(n, m); };
  for (int trial = 0; trial < 200; ++trial) {
    const auto lam = sample_gamma_k(n, n, rng);
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l)
        for (int r = 1; r <= k; ++r)
          for (int s = 0; s < r && s <= l; ++s) {
            const double lhs = std::pow(mean(lam, k) / mean(lam, l), 1.0 / (k - l));
            const double rhs = std::pow(mean(lam, r) / mean(lam, s), 1.0 / (r - s));
            EXPECT_LE(lhs, rhs * (1 + 1e-12));
          }
  }
}

TEST(DQuotient, SmallExamples) {
  const auto g = d_quotient(std::vector<double>{1, 2}, {2, 0, 2});
  EXPECT_DOUBLE_EQ(g[0], 2.0);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
  for (double x : d_quotient(std::vector<double>{1, 1, 1}, {1, 0, 3})) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(DQuotient, MatchesCentralDifference) {
  SampleRng rng({14, -1.0, 3.0});
  const int n = 4;
  for (int k = 1; k <= n; ++k)
    for (int l = 0; l < k; ++l) {
      const QuotientIndices q{k, l, n};
      for (int trial = 0; trial < 20; ++trial) {
        const auto lam = sample_gamma_k(n, k, rng, [&](std::span<const double> v) {
          std::vector<double> a(v.begin(), v.end());
          for (double& x : a) x = std::abs(x);
          return sigma(v, k) >= 1e-2 * sigma(a, k);
        });
        const auto g = d_quotient(lam, q);
        for (int i = 0; i < n; ++i) {
          const double h = 1e-6;
          auto p = lam, m = lam;
          p[i] += h;
          m[i] -= h;
          const double fd = (quotient(p, q) - quotient(m, q)) / (2 * h);
          EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
        }
      }
    }
}

TEST(EigenSym, SmallExamples) {
  const auto d = eigen_sym(SymMatrix::diagonal(std::vector<double>{2, 3}));
  EXPECT_DOUBLE_EQ(d.values[0], 3.0);
  EXPECT_DOUBLE_EQ(d.values[1], 2.0);
  EXPECT_NEAR(std::abs(d.vectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(d.vectors(0, 1)), 1.0, 1e-15);

  const auto s = eigen_sym(SymMatrix::from_rows({{0, 1}, {1, 0}}));
  EXPECT_NEAR(s.values[0], 1.0, 1e-15);
  EXPECT_NEAR(s.values[1], -1.0, 1e-15);
}

TEST(EigenSym, ReconstructionResidual) {
  SampleRng rng({15, -2.0, 2.0});
  for (int n : {3, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      SymMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, rng.box());
      const auto d = eigen_sym(a);
      Matrix lam(n);
      for (int i = 0; i < n; ++i) lam(i, i) = d.values[i];
      const Matrix r = d.vectors * lam * d.vectors.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) EXPECT_NEAR(r(i, j), a(i, j), 1e-10);
      for (int i = 1; i < n; ++i) EXPECT_GE(d.values[i - 1], d.values[i]);
    }
  }
}

TEST(LogQuotientMatrix, ClosedForms) {
  const auto id = log_quotient_matrix(SymMatrix::identity(2), {2, 0, 2});
  EXPECT_NEAR(id.value, 0.0, 1e-15);
  EXPECT_NEAR(id.F(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(id.F(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(id.F(0, 1), 0.0, 1e-14);

  const auto tr = log_quotient_matrix(SymMatrix::diagonal(std::vector<double>{1, 2}), {1, 0, 2});
  EXPECT_NEAR(tr.value, std::log(3.0), 1e-15);
  EXPECT_NEAR(tr.F(0, 0), 1.0 / 3, 1e-14);
  EXPECT_NEAR(tr.F(1, 1), 1.0 / 3, 1e-14);
  EXPECT_NEAR(tr.F(0, 1), 0.0, 1e-14);
}

TEST(LogQuotientMatrix, MatchesFiniteDifferenceOfMinors) {
  SampleRng rng({16, -1.0, 3.0});
  for (int trial = 0; trial < 50; ++trial) {
    const auto lam = sample_gamma_k(3, 2, rng, [](std::span<const double> v) {
      return sigma(v, 2) > 0.1;
    });
    const SymMatrix a = random_symmetric_with_spectrum(lam, rng);
    const QuotientIndices q{2, 1, 3};
    const auto lq = log_quotient_matrix(a, q);
    const SymMatrix fd = fij_fd(a, q);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_NEAR(lq.F(i, j), fd(i, j), 1e-5);
  }
}
