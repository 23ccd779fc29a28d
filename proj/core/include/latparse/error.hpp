#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latparse {

/// Broad failure category; the CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  Usage,     // bad flags or configuration values
  Missing,   // an input asset does not exist or cannot be opened
  Format,    // malformed file content
  Data,      // well-formed input that violates a domain invariant
  Numeric,   // non-finite values during training or scoring
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

class MissingAssetError : public Error {
 public:
  explicit MissingAssetError(const std::string& what) : Error(ErrorCategory::Missing, what) {}
};

/// Malformed file content. `line` is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorCategory::Format,
              source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class EmptySentenceError : public DataError {
 public:
  EmptySentenceError() : DataError("sentence lattice has no tokens") {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

}  // namespace latparse
