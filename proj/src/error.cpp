#include "corelr/error.hpp"

#include <charconv>
#include <system_error>

#include "corelr/format.hpp"

namespace corelr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "malformed-header";
    case ErrorKind::UnsupportedFeature: return "unsupported-feature";
    case ErrorKind::SizeMismatch: return "size-mismatch";
    case ErrorKind::InvalidLabel: return "invalid-label";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::DimsMismatch: return "dims-mismatch";
    case ErrorKind::InsufficientPersistentComponents: return "insufficient-persistent-components";
    case ErrorKind::NoDegreeOneVertex: return "no-degree-1-vertex";
    case ErrorKind::RootDegreeNotOne: return "root-degree-not-1";
    case ErrorKind::DegenerateHull: return "degenerate-hull";
    case ErrorKind::EmptyLesion: return "empty-lesion";
    case ErrorKind::EmptyHcz: return "empty-hcz";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::NonFiniteFeature: return "non-finite-feature";
    case ErrorKind::FeatureKeyMismatch: return "feature-key-mismatch";
    case ErrorKind::SingleRecord: return "single-record";
    case ErrorKind::SpecOutOfBounds: return "spec-out-of-bounds";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace corelr
