#pragma once

#include <stdexcept>
#include <string>

namespace binpick {

/// Malformed or inconsistent input data (files, descriptors, arguments).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A postcondition or invariant of the library itself failed.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace binpick
