#pragma once

#include <stdexcept>
#include <string>

namespace qam {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor argument violates a documented bound (e.g. "lambda1 >= 1").
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function and no extended-value
/// convention covers it.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (singular matrix, non-convergence, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (CLI specs, point files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qam
