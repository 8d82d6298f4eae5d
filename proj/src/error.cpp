#include "bklab/error.hpp"

namespace bklab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::HorizonExceeded: return "horizon";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Unsupported: return 2;
    case ErrorKind::Infeasible: return 3;
    case ErrorKind::HorizonExceeded: return 4;
  }
  return 1;
}

}  // namespace bklab
