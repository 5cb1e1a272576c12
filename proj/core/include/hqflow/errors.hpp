#pragma once

#include <stdexcept>
#include <string>

namespace hqflow {

/// Bad argument to a library call (index out of range, malformed input).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An eigenvalue vector (or the Hessian it came from) is outside the
/// Garding cone Gamma_k. Carries the first failing sigma_i.
class AdmissibilityError : public std::domain_error {
 public:
  AdmissibilityError(const std::string& what, int failing_order, double failing_value,
                     long node = -1)
      : std::domain_error(what),
        failing_order_(failing_order),
        failing_value_(failing_value),
        node_(node) {}

  [[nodiscard]] int failing_order() const noexcept { return failing_order_; }
  [[nodiscard]] double failing_value() const noexcept { return failing_value_; }
  /// Grid node index, or -1 when the error did not come from a grid.
  [[nodiscard]] long node() const noexcept { return node_; }

 private:
  int failing_order_;
  double failing_value_;
  long node_;
};

/// Operation called on an object in the wrong state (e.g. Hessian of a
/// grid function whose boundary values were never closed).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Problem data violates a structural requirement. `field` is the config
/// path of the offending entry when known.
class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what, std::string field = {})
      : std::runtime_error(what), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Time integration could not continue (dt floor reached, non-finite values).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hqflow
