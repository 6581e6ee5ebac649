#pragma once

#include <stdexcept>
#include <string>

namespace bbsp {

// Base for everything the library throws on bad input or broken invariants.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraphError : public Error {
 public:
  using Error::Error;
};

class NonPositiveWeightError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed (e.g. a placement without room for it).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace bbsp
