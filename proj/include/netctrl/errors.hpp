#pragma once

#include <stdexcept>
#include <string>

namespace netctrl {

enum class ErrorCode {
  NonSquare,
  NonPositivePeriod,
  DimensionMismatch,
  ConvergenceFailure,
  IllConditioned,
  NotAnEigenvector,
  UnknownEigenvalue,
  NotApplicable,
  ZeroWeight,
  ParseError,
  ValidationError,
  InternalInconsistency,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// One subclass per code so call sites can catch selectively.
#define NETCTRL_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorCode::Name, what) {}   \
  }

NETCTRL_DEFINE_ERROR(NonSquare);
NETCTRL_DEFINE_ERROR(NonPositivePeriod);
NETCTRL_DEFINE_ERROR(DimensionMismatch);
NETCTRL_DEFINE_ERROR(ConvergenceFailure);
NETCTRL_DEFINE_ERROR(IllConditioned);
NETCTRL_DEFINE_ERROR(NotAnEigenvector);
NETCTRL_DEFINE_ERROR(UnknownEigenvalue);
NETCTRL_DEFINE_ERROR(NotApplicable);
NETCTRL_DEFINE_ERROR(ZeroWeight);
NETCTRL_DEFINE_ERROR(ParseError);
NETCTRL_DEFINE_ERROR(ValidationError);
NETCTRL_DEFINE_ERROR(InternalInconsistency);

#undef NETCTRL_DEFINE_ERROR

}  // namespace netctrl
