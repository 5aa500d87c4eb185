#pragma once

#include <stdexcept>
#include <string>

namespace phbench {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or config text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Well-formed text describing an invalid robot (zero mass, bad axis, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

class MissingInteractionData : public Error {
 public:
  using Error::Error;
};

class NonQuasiStaticReference : public Error {
 public:
  using Error::Error;
};

class OverdampedUnsupported : public Error {
 public:
  using Error::Error;
};

class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

/// CSV log does not carry the columns an operation needs.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested time window lies outside the sampled range.
class WindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace phbench
