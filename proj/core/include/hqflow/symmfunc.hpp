#pragma once

// Elementary symmetric functions of eigenvalue lists and of symmetric
// matrices: sigma_m, the deleted functions sigma_m(lambda|i) and
// sigma_m(lambda|ij), Garding cone membership, the Hessian quotient
// sigma_k/sigma_l and its linearization.
//
// Indices are 0-based throughout. Functions taking a std::span use the
// entries in the order given; EigenList is the sorted (descending) form
// produced by eigen_sym.

#include <span>
#include <vector>

#include "hqflow/matrix.hpp"

namespace hqflow {

/// Orders (k, l) of the quotient sigma_k / sigma_l in dimension n.
/// Valid iff 0 <= l < k <= n.
struct QuotientIndices {
  int k = 1;
  int l = 0;
  int n = 2;

  /// Throws ArgumentError unless 0 <= l < k <= n and n >= 1.
  void validate() const;
};

/// Eigenvalues sorted descending. Ties keep input order.
class EigenList {
 public:
  EigenList() = default;
  /// Sorts; throws ArgumentError on fewer than 2 or non-finite entries.
  explicit EigenList(std::vector<double> values);

  [[nodiscard]] std::span<const double> span() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }
  [[nodiscard]] double operator[](int i) const noexcept { return values_[i]; }
  operator std::span<const double>() const noexcept { return values_; }  // NOLINT

 private:
  std::vector<double> values_;
};

/// sigma_0 .. sigma_{max_order} of lam, by one-variable-at-a-time
/// polynomial expansion prod_i (1 + lam_i t).
[[nodiscard]] std::vector<double> sigma_all(std::span<const double> lam, int max_order);

/// sigma_m(lam), 0 <= m <= n; sigma_0 = 1.
[[nodiscard]] double sigma(std::span<const double> lam, int m);

/// sigma_m of lam with entry i deleted; 0 <= m <= n-1.
[[nodiscard]] double sigma_omit(std::span<const double> lam, int m, int i);

/// sigma_m of lam with entries i and j deleted; i != j, 0 <= m <= n-2.
[[nodiscard]] double sigma_omit2(std::span<const double> lam, int m, int i, int j);

/// True iff sigma_i(lam) > cone_eps for every 1 <= i <= k.
[[nodiscard]] bool in_gamma_k(std::span<const double> lam, int k, double cone_eps = 0.0);

/// sigma_k / sigma_l. Throws AdmissibilityError (carrying the first failing
/// order) when lam is not in Gamma_k.
[[nodiscard]] double quotient(std::span<const double> lam, const QuotientIndices& q,
                              double cone_eps = 0.0);

/// Gradient of sigma_k/sigma_l with respect to each lam_i:
///   [sigma_{k-1}(lam|i) sigma_l - sigma_k sigma_{l-1}(lam|i)] / sigma_l^2.
[[nodiscard]] std::vector<double> d_quotient(std::span<const double> lam,
                                             const QuotientIndices& q, double cone_eps = 0.0);

struct SpectralDecomposition {
  EigenList values;
  /// Column c is the unit eigenvector for values[c]; A = Q diag(lam) Q^T.
  Matrix vectors;
};

/// Closed form for n = 2, cyclic Jacobi for n >= 3 (stops when the
/// off-diagonal Frobenius norm is below 1e-13 ||A||_F, at most 50 sweeps).
[[nodiscard]] SpectralDecomposition eigen_sym(const SymMatrix& a);

struct LogQuotient {
  double value = 0.0;  ///< log(sigma_k / sigma_l)(lambda(A))
  SymMatrix F;         ///< d value / d a_ij, positive definite on Gamma_k
};

/// log(sigma_k/sigma_l) of a symmetric matrix together with its first
/// derivative F = Q diag(g) Q^T, g_i = d_quotient_i / quotient.
[[nodiscard]] LogQuotient log_quotient_matrix(const SymMatrix& a, const QuotientIndices& q,
                                              double cone_eps = 0.0);

/// Same as log_quotient_matrix but reuses a decomposition already at hand.
[[nodiscard]] LogQuotient log_quotient_matrix(const SpectralDecomposition& eig,
                                              const QuotientIndices& q, double cone_eps = 0.0);

/// Binomial coefficient C(n, k) as a double.
[[nodiscard]] double binomial(int n, int k);

}  // namespace hqflow
