#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corelr {

enum class ErrorKind {
  MalformedHeader,
  UnsupportedFeature,
  SizeMismatch,
  InvalidLabel,
  OutOfBounds,
  DimsMismatch,
  InsufficientPersistentComponents,
  NoDegreeOneVertex,
  RootDegreeNotOne,
  DegenerateHull,
  EmptyLesion,
  EmptyHcz,
  EmptyDataset,
  NonFiniteFeature,
  FeatureKeyMismatch,
  SingleRecord,
  SpecOutOfBounds,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace corelr
