#pragma once

#include <stdexcept>
#include <string>

namespace shapedba {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input data (files, non-finite samples, bad labels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Two series whose lengths must match do not.
class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t lhs, std::size_t rhs, const std::string& what)
      : Error(what + ": length mismatch (" + std::to_string(lhs) + " vs " +
              std::to_string(rhs) + ")"),
        lhs_(lhs),
        rhs_(rhs) {}

  std::size_t lhs() const noexcept { return lhs_; }
  std::size_t rhs() const noexcept { return rhs_; }

 private:
  std::size_t lhs_;
  std::size_t rhs_;
};

/// A parameter is outside its domain (gamma <= 0, reach == 0, k > N, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace shapedba
