#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace judge {

/// Base of every error raised by the judge libraries.
class JudgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The judge itself failed (sandbox setup, checker crash, I/O). Never
/// attributed to the submission.
class InfrastructureError : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class SandboxFault : public InfrastructureError {
 public:
  using InfrastructureError::InfrastructureError;
};

/// Malformed external input (JSON, package files, logs).
class FormatError : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class PackageMalformed : public JudgeError {
 public:
  explicit PackageMalformed(std::vector<std::string> diagnostics);

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

class BoundsError : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class BudgetExceeded : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class DegenerateBest : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

class MalformedLog : public JudgeError {
 public:
  using JudgeError::JudgeError;
};

}  // namespace judge
