#pragma once

#include <stdexcept>
#include <string>

namespace likefarm {

/// Root of every exception thrown by the library. The CLI maps these to
/// exit code 1 with a single-line diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input line; the message carries "file:line".
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An id that should resolve to an entity but does not.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Degree filtering left nothing to cluster.
class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge, or a degenerate matrix was met.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace likefarm
