#pragma once

#include <stdexcept>
#include <string>

namespace snspd {

// Error taxonomy; numeric values double as C API status / CLI exit codes.
enum class ErrorKind {
  validation = 2,
  numeric = 3,
  insufficient_data = 4,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& m) : Error(ErrorKind::validation, m) {}
};

// Query outside tabulated/allowed bounds. A validation failure, kept as its
// own type so callers can distinguish "bad table" from "bad query".
struct RangeError : ValidationError {
  explicit RangeError(const std::string& m) : ValidationError(m) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& m) : Error(ErrorKind::numeric, m) {}
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& m)
      : Error(ErrorKind::insufficient_data, m) {}
};

}  // namespace snspd
