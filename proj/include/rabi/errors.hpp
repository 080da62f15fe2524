#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rabi {

// Base of every error raised by the library. Callers that do not care about
// the specific failure can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string field, double value)
      : Error("invalid parameter " + field + " = " + std::to_string(value)),
        field_(std::move(field)),
        value_(value) {}

  const std::string& field() const noexcept { return field_; }
  double value() const noexcept { return value_; }

 private:
  std::string field_;
  double value_;
};

class ZeroCoupling : public Error {
 public:
  ZeroCoupling() : Error("G-function recurrence is undefined at g == 0") {}
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(int n_max)
      : Error("series did not converge within n_max = " + std::to_string(n_max)),
        n_max_(n_max) {}

  int n_max() const noexcept { return n_max_; }

 private:
  int n_max_;
};

class PoleProximity : public Error {
 public:
  PoleProximity(double x, int nearest_pole)
      : Error("x = " + std::to_string(x) + " is within the pole guard of " +
              std::to_string(nearest_pole)),
        x_(x),
        nearest_pole_(nearest_pole) {}

  double x() const noexcept { return x_; }
  int nearest_pole() const noexcept { return nearest_pole_; }

 private:
  double x_;
  int nearest_pole_;
};

class InvalidTruncation : public Error {
 public:
  explicit InvalidTruncation(int m)
      : Error("Fock truncation must be >= 2, got " + std::to_string(m)) {}
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class TruncationExceeded : public Error {
 public:
  explicit TruncationExceeded(int m_cap)
      : Error("oracle did not converge below the Fock cap M = " + std::to_string(m_cap)),
        m_cap_(m_cap) {}

  int m_cap() const noexcept { return m_cap_; }

 private:
  int m_cap_;
};

// Raised where a computation is well defined only for isolated points and the
// input is degenerate everywhere (e.g. delta == 0).
class DegenerateCase : public Error {
 public:
  using Error::Error;
};

class IncompleteCoverage : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace rabi
