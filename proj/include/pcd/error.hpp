#pragma once

#include <stdexcept>
#include <string>

namespace pcd {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (r < 1, eps out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be processed (outside points, duplicates, parse errors).
class DataError : public Error {
 public:
  using Error::Error;
};

// No closed form exists for the requested quantity at these arguments.
class ClosedFormUnavailable : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed its own self-check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcd
