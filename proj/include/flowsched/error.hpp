#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowsched {

enum class ErrorCode {
  MalformedHeader,
  RowLengthMismatch,
  UnknownCell,
  MalformedSidecar,
  SourceBlocked,
  StationBlocked,
  MapSaturated,
  NoFreeAgents,
  ProtocolError,
  Timeout,
  Unbalanced,
  InfeasibleCost,
  FlowMismatch,
  Infeasible,
  WaypointExhausted,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::RowLengthMismatch: return "RowLengthMismatch";
    case ErrorCode::UnknownCell: return "UnknownCell";
    case ErrorCode::MalformedSidecar: return "MalformedSidecar";
    case ErrorCode::SourceBlocked: return "SourceBlocked";
    case ErrorCode::StationBlocked: return "StationBlocked";
    case ErrorCode::MapSaturated: return "MapSaturated";
    case ErrorCode::NoFreeAgents: return "NoFreeAgents";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::Unbalanced: return "Unbalanced";
    case ErrorCode::InfeasibleCost: return "InfeasibleCost";
    case ErrorCode::FlowMismatch: return "FlowMismatch";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::WaypointExhausted: return "WaypointExhausted";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace flowsched
