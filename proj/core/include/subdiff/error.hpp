#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input parameter (alpha out of range, bad sizes, unknown ids).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Starting-weight system too ill-conditioned to trust.
class ConditioningError : public Error {
public:
  ConditioningError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

private:
  double condition_;
};

/// Zero pivot or failed factorization.
class SingularMatrixError : public Error {
public:
  SingularMatrixError(const std::string& what, long pivot)
      : Error(what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

private:
  long pivot_;
};

/// Quadrature oracle did not reach the requested tolerance.
class OracleError : public Error {
public:
  using Error::Error;
};

/// A time step failed; wraps the underlying cause with the step index.
class StepError : public Error {
public:
  StepError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

private:
  int step_;
};

} // namespace subdiff
