#pragma once

#include <stdexcept>
#include <string>

namespace gesturegan {

// Base of every error raised by the toolkit. Validation errors describe bad
// inputs; everything else is treated as an internal failure by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool is_validation() const { return true; }
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Parse failure of a text format, with the 1-based line it happened on.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRatioError : public Error {
 public:
  using Error::Error;
};

class MissingJointError : public Error {
 public:
  using Error::Error;
};

class TooShortError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class ChunkSizeError : public Error {
 public:
  using Error::Error;
};

// Tensor shape disagreement. The message names the offending tensor.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  explicit ConfigError(const std::string& message) : ConfigError(0, message) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or activation during training.
class NumericError : public Error {
 public:
  using Error::Error;
  bool is_validation() const override { return false; }
};

}  // namespace gesturegan
