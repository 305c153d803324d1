#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace nhad {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Text input could not be parsed. `line()` is 1-based when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
      : Error(line ? "line " + std::to_string(*line) + ": " + what : what), line_(line) {}

  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::optional<std::size_t> line_;
};

class SchemaMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownLabel : public Error {
 public:
  using Error::Error;
};

class AllRulesSilent : public Error {
 public:
  using Error::Error;
};

class ZeroMass : public Error {
 public:
  using Error::Error;
};

class EmptyCommunity : public Error {
 public:
  using Error::Error;
};

class EmptyHistory : public Error {
 public:
  using Error::Error;
};

class UnknownUser : public Error {
 public:
  using Error::Error;
};

class UnknownCommunity : public Error {
 public:
  using Error::Error;
};

class NoRemovableEdge : public Error {
 public:
  using Error::Error;
};

class UnmappedProperty : public Error {
 public:
  using Error::Error;
};

class MissingVerdict : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nhad
