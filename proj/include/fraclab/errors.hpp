#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// An argument outside the domain where a formula is defined (zero divisor,
/// nonpositive exponent, invalid grid).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A formula is defined but the theorem hypotheses it belongs to fail.
struct HypothesisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Homogeneous operator applied to data whose mean mode it cannot represent.
struct ZeroModeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A field acquired NaN or Inf samples.
struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fraclab
