#pragma once

#include <stdexcept>
#include <string>

namespace panelist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file does not match its schema or violates a study invariant.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: bad flag values, missing credentials, unbalanced designs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Network failure that survived the retry budget.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The provider answered, but with an error status or an unreadable payload.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A scripted mock was asked something it has no answer for.
class UnscriptedPromptError : public Error {
 public:
  explicit UnscriptedPromptError(const std::string& digest);
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

/// Statistical preconditions failed (unbalanced cells, zero variance, ...).
class StatsError : public Error {
 public:
  using Error::Error;
};

/// The session protocol was violated by a caller.
class ProtocolOrderError : public Error {
 public:
  using Error::Error;
};

}  // namespace panelist
