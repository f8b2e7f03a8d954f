#pragma once

#include <stdexcept>
#include <string>

namespace holesynth {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model, realization, property or other argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap was hit (sweep limit, action cap, member cap, ...).
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A rerouting vector turned out not to bound the member's reachability values.
class InvalidBounds : public Error {
 public:
  using Error::Error;
};

}  // namespace holesynth
