#include "pickplace/error.hpp"

namespace pickplace {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AngleNearPi: return "AngleNearPi";
    case ErrorKind::NonPositiveVoxel: return "NonPositiveVoxel";
    case ErrorKind::EmptyTree: return "EmptyTree";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoCorrespondences: return "NoCorrespondences";
    case ErrorKind::MissingNormals: return "MissingNormals";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::InsufficientViews: return "InsufficientViews";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::DivergedRefinement: return "DivergedRefinement";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::DegenerateMotions: return "DegenerateMotions";
    case ErrorKind::WrongFrame: return "WrongFrame";
    case ErrorKind::EmptyCloud: return "EmptyCloud";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::MissingSidecar: return "MissingSidecar";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::EmptyAfterCulling: return "EmptyAfterCulling";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace pickplace
