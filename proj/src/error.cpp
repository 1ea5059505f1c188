#include "twocopy/error.hpp"

namespace twocopy {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Estimation: return "estimation";
    case ErrorCode::Fit: return "fit";
    case ErrorCode::Io: return "io";
    case ErrorCode::Usage: return "usage";
  }
  return "unknown";
}

int exit_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Usage: return 2;
    case ErrorCode::Io: return 3;
    case ErrorCode::Validation: return 4;
    case ErrorCode::Estimation: return 5;
    case ErrorCode::Fit: return 6;
  }
  return 1;
}

}  // namespace twocopy
