#pragma once

#include <stdexcept>
#include <string>

namespace twocopy {

// Stable error codes surface through the CLI as machine-readable JSON.
enum class ErrorCode {
  Validation,
  Estimation,
  Fit,
  Io,
  Usage,
};

const char* error_code_name(ErrorCode code) noexcept;
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorCode::Validation, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error(ErrorCode::Estimation, what) {}
};

class FitError : public Error {
 public:
  FitError(const std::string& what, std::string diagnostics)
      : Error(ErrorCode::Fit, what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCode::Usage, what) {}
};

}  // namespace twocopy
