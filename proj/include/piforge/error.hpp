#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace piforge {

enum class ErrorKind {
  ArityMismatch,
  DimensionMismatch,
  SystemMismatch,
  EmptyList,
  Inconsistent,
  NoSolution,
  DependentBase,
  NotABasis,
  SyntaxError,
  UnknownFundamental,
  UnknownUnit,
  UnknownVariable,
  DimensionError,
  NonPositive,
  SpecError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SystemMismatch: return "SystemMismatch";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::DependentBase: return "DependentBase";
    case ErrorKind::NotABasis: return "NotABasis";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFundamental: return "UnknownFundamental";
    case ErrorKind::UnknownUnit: return "UnknownUnit";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::SpecError: return "SpecError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace piforge
