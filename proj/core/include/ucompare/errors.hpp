#pragma once

#include <stdexcept>
#include <string>

namespace ucompare {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries the 1-based row and column when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Full enumeration would exceed the configured budget; switch to a random design.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// The sample is too small for the requested U-statistic degree.
class InsufficientSample : public Error {
 public:
  InsufficientSample(const std::string& what, std::size_t n, std::size_t required)
      : Error(what), n_(n), required_(required) {}

  std::size_t sample_size() const noexcept { return n_; }
  std::size_t required_size() const noexcept { return required_; }

 private:
  std::size_t n_;
  std::size_t required_;
};

/// Studentization was attempted with a non-positive variance.
class DegenerateVariance : public Error {
 public:
  DegenerateVariance(const std::string& what, double variance)
      : Error(what), variance_(variance) {}

  double variance() const noexcept { return variance_; }

 private:
  double variance_;
};

}  // namespace ucompare
