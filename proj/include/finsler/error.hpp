#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finsler {

enum class ErrorKind {
  ZeroVector,
  OutOfChart,
  NotPositiveDefinite,
  Singular,
  OrderTooHigh,
  DomainError,
  DegreeOverflow,
  DegreeUnderflow,
  DegreeMismatch,
  DimensionUnsupported,
  PoleSingularity,
  GridError,
  ConfigError,
  TaskError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the engine; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::OrderTooHigh: return "OrderTooHigh";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegreeOverflow: return "DegreeOverflow";
    case ErrorKind::DegreeUnderflow: return "DegreeUnderflow";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::GridError: return "GridError";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::TaskError: return "TaskError";
  }
  return "Unknown";
}

}  // namespace finsler
