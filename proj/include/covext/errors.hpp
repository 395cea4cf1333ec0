#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace covext {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind {
  kInvalidInput = 2,
  kSolver = 3,
  kVerification = 4,
  kStructural = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Throw(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Compact rendering of a number for messages ("%.6g").
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace covext
