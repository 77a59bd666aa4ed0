#pragma once

#include <stdexcept>
#include <string>

namespace thermrom {

/// Base for all errors raised by the library. Each subclass maps onto one
/// CLI exit code (see cli.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value outside the mathematical domain of an operation (c1 <= 0, c3 = 0,
/// zero-mean normalization, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data: CSV syntax, misaligned series,
/// missing columns, non-uniform sampling.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Every optimizer start exhausted its evaluation budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Numerical blow-up or a broken internal invariant.
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermrom
