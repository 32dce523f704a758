#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluation overflowed (ExpSquare at large arguments, or a modular that
/// left the effective domain).
class NonFinite : public Error {
 public:
  using Error::Error;
};

/// A monotone bracket could not be grown far enough.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class CertificationFailure : public Error {
 public:
  using Error::Error;
};

class UnsupportedKind : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (JSON configs, parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace orlicz
