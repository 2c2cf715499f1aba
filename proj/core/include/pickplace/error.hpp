#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pickplace {

enum class ErrorKind {
  AngleNearPi,
  NonPositiveVoxel,
  EmptyTree,
  TooFewPoints,
  DegenerateGeometry,
  ParseError,
  IoError,
  LengthMismatch,
  NoCorrespondences,
  MissingNormals,
  InvalidArgument,
  BehindCamera,
  DegenerateConfiguration,
  InsufficientViews,
  IllConditioned,
  DivergedRefinement,
  EmptyInput,
  TooFewSamples,
  TooFewPairs,
  DegenerateMotions,
  WrongFrame,
  EmptyCloud,
  NoMatch,
  MissingSidecar,
  SchemaVersionMismatch,
  InvalidSpec,
  EmptyAfterCulling,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pickplace
