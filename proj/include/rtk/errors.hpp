#pragma once

#include <stdexcept>
#include <string>

namespace rtk {

enum class ErrorCode {
  kShapeMismatch,
  kIndexOutOfRange,
  kSingularTensor,
  kNotHermitian,
  kNotHermitianBlocks,
  kNotRankOne,
  kNotSymplectic,
  kSingularQ1,
  kImaginaryAxisEigenvalue,
  kNoUniqueSolution,
  kUnstableCoefficient,
  kUnstableSystem,
  kUnstableClosedLoop,
  kNotStabilizable,
  kNotDetectable,
  kSingularResolvent,
  kGammaTooSmall,
  kConvergenceFailure,
  kMaxIterationsExceeded,
  kParseError,
  kValidationError,
};

const char* error_name(ErrorCode code);

// Process exit status used by the command line tool for each error class.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace rtk
