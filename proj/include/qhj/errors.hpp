#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qhj {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or argument validation failure (bad grids, mismatched shapes,
/// unbound symbols, too few samples).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Numerical-domain failure: caustics, wrap-around on the periodic box,
/// t <= 0 for a kernel, fully masked phase slices.
class DomainError : public Error {
 public:
  using Error::Error;
};

class CausticError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DomainTooSmallError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Every node of some time slice fell below the zero threshold.
class CausticSliceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Shooting did not converge to a classical path.
class NoPathError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Corrupt or inconsistent persisted data.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Raised when a symbolic derivation leaves terms that should have cancelled,
/// or when two independent symbolic routes disagree.
class DerivationFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        message_(message),
        position_(position) {}

  const std::string& message() const { return message_; }
  std::size_t position() const { return position_; }

 private:
  std::string message_;
  std::size_t position_;
};

}  // namespace qhj
