#pragma once

#include <stdexcept>
#include <string>

namespace morselab {

/// Invalid user-facing configuration (grid spec, exponent range, flow parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand sizes do not match the grid they are used with.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-SPD Gram matrix, eigensolver breakdown, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation that requires a nondegenerate critical point was handed a degenerate one.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two critical points are within the classification tolerance of the same state.
class AmbiguityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of a pipeline stage does not hold (wrong index difference, unresolved count, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad command-line usage (unknown plot kind, missing subcommand input).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace morselab
