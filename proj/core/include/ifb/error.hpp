#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifb {

enum class ErrorCode {
  NonDivisibleExtent,
  NonFiniteSample,
  BoundaryNode,
  EmptyBall,
  NegativityViolation,
  GridMismatch,
  NegativeBoundary,
  PointTooDeep,
  RadiiUnresolvable,
  DegenerateData,
  EmptyFB,
  HypothesisViolation,
  BadParameter,
  OracleFailure,
  ParseError,
  ValidationError,
  NonConvergence,
  FixedPointNonConvergence,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` names the
// failure class so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ifb
