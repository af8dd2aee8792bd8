#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace texinv {

enum class ErrorCode {
  InvalidArgument,
  InvalidConfig,
  CoincidentLines,
  InvalidPolygon,
  DegenerateSites,
  UnboundedCell,
  DegenerateRoles,
  SamplingExhausted,
  SchemaMismatch,
  CorruptRecord,
  NoFiniteCenter,
  IdenticalVanishingPoints,
  EdgeOnPlane,
  UnboundedMeasure,
  NonpositiveExtent,
  RayParallelToPlane,
  BehindViewer,
  EmptyBoundary,
  OutOfFrustum,
  UnknownSession,
  PhaseViolation,
  EmptySelection,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::CoincidentLines: return "CoincidentLines";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::DegenerateSites: return "DegenerateSites";
    case ErrorCode::UnboundedCell: return "UnboundedCell";
    case ErrorCode::DegenerateRoles: return "DegenerateRoles";
    case ErrorCode::SamplingExhausted: return "SamplingExhausted";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::NoFiniteCenter: return "NoFiniteCenter";
    case ErrorCode::IdenticalVanishingPoints: return "IdenticalVanishingPoints";
    case ErrorCode::EdgeOnPlane: return "EdgeOnPlane";
    case ErrorCode::UnboundedMeasure: return "UnboundedMeasure";
    case ErrorCode::NonpositiveExtent: return "NonpositiveExtent";
    case ErrorCode::RayParallelToPlane: return "RayParallelToPlane";
    case ErrorCode::BehindViewer: return "BehindViewer";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::OutOfFrustum: return "OutOfFrustum";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::PhaseViolation: return "PhaseViolation";
    case ErrorCode::EmptySelection: return "EmptySelection";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace texinv
