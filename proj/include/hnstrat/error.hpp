#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hnstrat {

enum class ErrorCode {
  DenominatorZero,
  InvalidTestObject,
  MissingHNData,
  EpsilonTooLarge,
  ChainNotDecreasing,
  NotCompatible,
  MissingCrossing,
  EmptyType,
  OrderingViolated,
  SumZeroViolated,
  BudgetExceeded,
  NonUnique,
  MalformedDecomposition,
  Discrepancy,
  InvalidInput,
  Parse,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DenominatorZero: return "DenominatorZero";
    case ErrorCode::InvalidTestObject: return "InvalidTestObject";
    case ErrorCode::MissingHNData: return "MissingHNData";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::ChainNotDecreasing: return "ChainNotDecreasing";
    case ErrorCode::NotCompatible: return "NotCompatible";
    case ErrorCode::MissingCrossing: return "MissingCrossing";
    case ErrorCode::EmptyType: return "EmptyType";
    case ErrorCode::OrderingViolated: return "OrderingViolated";
    case ErrorCode::SumZeroViolated: return "SumZeroViolated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NonUnique: return "NonUnique";
    case ErrorCode::MalformedDecomposition: return "MalformedDecomposition";
    case ErrorCode::Discrepancy: return "Discrepancy";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hnstrat
