#pragma once

#include <stdexcept>
#include <string>

namespace memgate {

// Base of every error raised by the library. Callers that only care about
// "the computation failed" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value lies outside the bounds a function accepts (memristor programming,
// input voltages, grids).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Non-positive resistance or capacitance handed to a closed-form formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The circuit has the wrong topology/family for the requested operation, or
// tabular data has inconsistent dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Configuration rejected before any computation starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + " A)"),
        best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

// A bisection target (peak input, programmed template value) cannot be reached
// with the available parameter range.
class UnreachableTargetError : public Error {
 public:
  UnreachableTargetError(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}
  double achievable_lo() const noexcept { return lo_; }
  double achievable_hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

class NoTriggerError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace memgate
