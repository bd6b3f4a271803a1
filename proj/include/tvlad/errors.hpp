#pragma once

#include <stdexcept>
#include <string>

namespace tvlad {

// Exit-code families used by the CLI: 1 config, 2 data, 3 numeric, 4 internal.
enum class ErrorCategory { Config = 1, Data = 2, Numeric = 3, Internal = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

/// Raised when a local fit is requested at a point whose kernel window leaves the sample.
class BoundaryError : public DataError {
 public:
  explicit BoundaryError(const std::string& what) : DataError(what) {}
};

}  // namespace tvlad
