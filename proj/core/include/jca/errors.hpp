#pragma once

#include <stdexcept>
#include <string>

namespace jca {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (matrix products, concatenation, params vs data).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared in a computation that requires finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Concordance denominator vanished; the loss is undefined for this batch.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or violated precondition on user input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Binary / text file does not follow its declared format.
class FormatError : public Error {
 public:
  enum class Kind { BadMagic, Truncated, VersionMismatch, Malformed, OutOfRange };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// File could not be opened, read, or written.
class IoError : public Error {
 public:
  using Error::Error;
};

const char* to_string(FormatError::Kind kind);

}  // namespace jca
