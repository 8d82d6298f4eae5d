#pragma once

#include <stdexcept>
#include <string>

namespace bklab {

enum class ErrorKind {
  Validation,        // malformed input or violated precondition
  Unsupported,       // (regime, r, p) outside every proven statement
  Infeasible,        // a construction has no admissible choice within the horizon
  HorizonExceeded,   // evaluation beyond a horizon or a support cap
};

const char* to_string(ErrorKind kind) noexcept;

/// Process exit status used by the command line runner for each kind.
int exit_code(ErrorKind kind) noexcept;

class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw LabError(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::Validation, what);
}

}  // namespace bklab
