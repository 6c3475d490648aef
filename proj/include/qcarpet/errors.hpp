#pragma once

#include <stdexcept>
#include <string>

namespace qcarpet {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configuration or superposition violates one of the model constraints.
/// The message names the violated constraint.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-convergence, insufficient resolution, no scaling band.
class NumericalError : public std::runtime_error {
 public:
  enum class Kind {
    Convergence,
    WindowTooSmall,
    Resolution,
    NoScalingBand,
    Cutoff,
    Nyquist,
    Quadrature,
  };

  NumericalError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcarpet
