#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergolab {

enum class ErrorCode {
  // rank_one
  DivergentMass,
  EmptyRecipe,
  StageOrder,
  ShiftTooLarge,
  BadWeights,
  UnknownPreset,
  // markov
  DimensionMismatch,
  NotDoublyStochastic,
  NotMixing,
  NotErgodic,
  OverlapViolation,
  BadMarginals,
  // cascade
  UndefinedOrbit,
  ZeroMeanViolation,
  // shared
  BudgetExceeded,
  ConfigError,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every precondition failure in the library surfaces as this exception.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ergolab
