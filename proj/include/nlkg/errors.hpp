#pragma once

#include <stdexcept>
#include <string>

namespace nlkg {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument or configuration violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A field holds NaN or Inf values.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical procedure did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw DomainError(what);
}

}  // namespace nlkg
