#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace localfrac {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Evaluation at a pole (gamma at 0, -1, -2, ...).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Result would exceed the double range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// A series, limit, or refinement failed to converge within its budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Symbolic differentiation cannot handle the requested form.
class UnsupportedFormError : public Error {
 public:
  using Error::Error;
};

// Parse failure. Carries the byte offset of the failure point and a
// description of what was expected there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected)
      : Error("parse error at offset " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

}  // namespace localfrac
