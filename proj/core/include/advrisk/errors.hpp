#pragma once

#include <stdexcept>
#include <string>

namespace advrisk {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (bad eta, unknown loss name, malformed input).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds the configured solver budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, double lo = 0.0, double hi = 0.0)
      : Error(what), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

/// Raised when the unique regime admits no inconsistency witness.
class NoWitnessError : public Error {
 public:
  using Error::Error;
};

class UndecidableError : public Error {
 public:
  using Error::Error;
};

}  // namespace advrisk
