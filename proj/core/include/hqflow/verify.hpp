#pragma once

// Randomized property suite for the symmetric-function layer: algebraic
// identities, the sorted-spectrum inequalities, Newton-MacLaurin, the
// negative-entry, arrow-matrix and pinched-spectrum derivative bounds,
// concavity and positivity of F.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hqflow {

/// sigma_m of a list; the suite routes every sigma through one of these.
using SigmaFn = std::function<double(std::span<const double>, int)>;

/// Expansion sigma with a deliberate sign bug (the last entry enters with the
/// wrong sign). Only for self-testing the suite.
[[nodiscard]] double faulty_sigma(std::span<const double> lam, int m);

struct VerifyOptions {
  std::uint64_t seed = 42;
  long trials = 10'000;  ///< per property
  int n_min = 2;
  int n_max = 8;
  bool inject_fault = false;  ///< use faulty_sigma as the shadow sigma
  /// Dimensions for the finite-difference derivative property.
  int fd_n_max = 4;
  double identity_tol = 1e-12;
  double inequality_tol = 1e-10;
  double fd_tol = 1e-5;
};

struct PropertyResult {
  std::string name;
  std::string kind;  ///< "identity" or "inequality"
  long trials = 0;
  long passed = 0;
  /// Smallest normalized margin; a trial passes iff its margin >= -tolerance.
  /// Identities use -|lhs - rhs| / scale.
  double worst_margin = 0.0;
  double tolerance = 0.0;
  [[nodiscard]] bool ok() const { return passed == trials; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  long trials = 0;
  bool inject_fault = false;
  std::vector<PropertyResult> properties;
  std::vector<std::string> warnings;
  [[nodiscard]] bool passed() const;
};

[[nodiscard]] VerifyReport run_verify(const VerifyOptions& opt = {});

/// Margin of lhs >= rhs normalized by max(1, |lhs|, |rhs|).
[[nodiscard]] double inequality_margin(double lhs, double rhs);

}  // namespace hqflow
