#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// A precondition on an argument was violated (bad size, range, normalization).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A seeded construction was requested without a seed.
class MissingSeed : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A coin was asked to act on a vertex whose coin dimension it does not support.
class UnsupportedDegree : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Probability mass or amplitude tried to leave the finite window of the line.
class BoundaryOverflow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A numerical invariant (normalization, trace, hermiticity) drifted past tolerance.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwalk
