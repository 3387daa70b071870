#pragma once

#include <stdexcept>
#include <string>

namespace trustnav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input files, bad configuration values.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A precondition on domain values was violated (overlapping spans,
/// occupied endpoints, unknown verbs, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace trustnav
