#pragma once

#include <stdexcept>
#include <string>

namespace cwalk {

// Precondition violations use std::invalid_argument directly. The types below
// cover the remaining failure classes so callers (and the CLI exit codes) can
// tell them apart.

/// Memory, size or iteration caps exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical method failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs are individually valid but jointly produce a probability outside
/// [0,1] by more than the clamping tolerance.
class InconsistentInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cwalk
