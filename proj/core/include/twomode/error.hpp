#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twomode {

/// Failure categories raised across the library. Each maps to one
/// documented precondition or numerical failure.
enum class Errc {
  NotSymmetric,
  NotPositiveDefinite,
  NegativeRadicand,
  NoRealSolution,
  DomainError,
  DuanUndefined,
  DegenerateSample,
  SampleSizeOutOfRange,
  EmptyBin,
  EmptyTrace,
  EfficiencyOutOfRange,
  MissingEstimate,
  OrderTooLarge,
  QuadratureNotConverged,
  ParseError,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace twomode
