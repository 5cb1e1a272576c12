#pragma once

// Slow, independent references: subset-enumeration sigma, finite-difference
// F from principal-minor determinants, and seeded Gamma_k samplers. None of
// this calls the fast paths in symmfunc.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "hqflow/errors.hpp"
#include "hqflow/matrix.hpp"
#include "hqflow/symmfunc.hpp"

namespace hqflow {

struct RngSpec {
  std::uint64_t seed = 42;
  double lo = -1.0;  ///< sampling box for eigenvalues
  double hi = 3.0;
};

/// Seeded stream; identical seeds give identical draws.
class SampleRng {
 public:
  explicit SampleRng(RngSpec spec) : spec_(spec), engine_(spec.seed) {}
  [[nodiscard]] double uniform(double a, double b);
  [[nodiscard]] double box() { return uniform(spec_.lo, spec_.hi); }
  [[nodiscard]] int uniform_int(int a, int b);  ///< inclusive
  [[nodiscard]] double normal();
  [[nodiscard]] const RngSpec& spec() const noexcept { return spec_; }

 private:
  RngSpec spec_;
  std::mt19937_64 engine_;
};

class SamplingError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Literal sum over all m-subsets. n <= 12.
[[nodiscard]] double sigma_brute(std::span<const double> lam, int m);

/// sigma_m of the eigenvalues of A as the sum of m x m principal minors.
[[nodiscard]] double sigma_minors(const SymMatrix& a, int m);

/// Central-difference F^{ij} = d log(sigma_k/sigma_l)(A) / d a_ij using
/// sigma_minors. Off-diagonal entries move a_ij and a_ji by h/2 each.
/// Shrinks h by 10 while a perturbation leaves Gamma_k; throws ArgumentError
/// below 1e-12.
[[nodiscard]] SymMatrix fij_fd(const SymMatrix& a, const QuotientIndices& q, double h = 1e-6);

using SampleFilter = std::function<bool(std::span<const double>)>;

/// Rejection sampling: entries uniform in the box, accepted when in Gamma_k
/// and the filter (if any) agrees. Returned in draw order, not sorted.
/// Throws SamplingError after 10^6 rejections.
[[nodiscard]] std::vector<double> sample_gamma_k(int n, int k, SampleRng& rng,
                                                 const SampleFilter& filter = {});

/// Haar-like random orthogonal matrix (Gram-Schmidt of a Gaussian matrix).
[[nodiscard]] Matrix random_orthogonal(int n, SampleRng& rng);

/// Q diag(lam) Q^T with Q from random_orthogonal.
[[nodiscard]] SymMatrix random_symmetric_with_spectrum(std::span<const double> lam,
                                                       SampleRng& rng);

}  // namespace hqflow
