#pragma once

#include <stdexcept>
#include <string>

namespace corevad {

enum class ErrorKind {
  validation,
  io,
  undefined_metric,
  invalid_argument,
};

/// Exception type for every recoverable failure in the library. The kind
/// maps onto the CLI exit code (see exit_code()).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::invalid_argument:
      return 1;
    case ErrorKind::io:
      return 2;
    case ErrorKind::undefined_metric:
      return 3;
  }
  return 1;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace corevad
