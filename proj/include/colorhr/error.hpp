#pragma once

#include <stdexcept>
#include <string>

namespace colorhr {

enum class ErrorCode {
  InvalidDimension,
  InvalidParameter,
  RankDeficiency,
  InvalidArgument,
  OutsideNaturalSpace,
  Structure,
  SizeGuard,
  Infeasible,
  DegenerateMargin,
  EstimatorUndefined,
  Parse,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Errors caused by malformed input rather than by the numerics.
  bool is_usage() const noexcept {
    return code_ == ErrorCode::InvalidArgument || code_ == ErrorCode::Parse ||
           code_ == ErrorCode::InvalidDimension || code_ == ErrorCode::Structure;
  }

 private:
  ErrorCode code_;
};

}  // namespace colorhr
