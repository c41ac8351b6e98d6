#pragma once

#include <stdexcept>
#include <string>

namespace symcap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An even root or fractional power of a provably negative quantity, or a
/// division by a provably zero quantity.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Interval refinement reached the precision budget without deciding.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

/// A search or reduction exceeded its configured node/move budget.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A construction was requested outside the range where it is proven.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

/// An internal self-check failed. Seeing this is a bug.
class VerificationFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace symcap
