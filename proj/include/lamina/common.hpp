#pragma once
// Shared error taxonomy and small utilities for the lamina library.

#include <stdexcept>
#include <string>
#include <sstream>
#include <vector>
#include <cstdint>

namespace lamina {

enum class errc {
  // surface
  IllegalSurface,
  NonManifoldGluing,
  WrongArcCount,
  IllegalTag,
  ArcNotInTriangulation,
  UnknownIntersectionData,
  // cluster
  FrozenVertex,
  InexactDivision,
  NotHomogeneous,
  SizeGuardExceeded,
  // lamination
  NotATraversal,
  ForbiddenCurve,
  WordRequired,
  UnstableSpiral,
  NotClosed,
  CorridorAmbiguous,
  NoStabilization,
  SelfFoldedPresent,
  Unclassifiable,
  // cones
  DimensionMismatch,
  UnsupportedDimension,
  // cli
  UnknownExample,
  IoFailure,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::IllegalSurface: return "IllegalSurface";
    case errc::NonManifoldGluing: return "NonManifoldGluing";
    case errc::WrongArcCount: return "WrongArcCount";
    case errc::IllegalTag: return "IllegalTag";
    case errc::ArcNotInTriangulation: return "ArcNotInTriangulation";
    case errc::UnknownIntersectionData: return "UnknownIntersectionData";
    case errc::FrozenVertex: return "FrozenVertex";
    case errc::InexactDivision: return "InexactDivision";
    case errc::NotHomogeneous: return "NotHomogeneous";
    case errc::SizeGuardExceeded: return "SizeGuardExceeded";
    case errc::NotATraversal: return "NotATraversal";
    case errc::ForbiddenCurve: return "ForbiddenCurve";
    case errc::WordRequired: return "WordRequired";
    case errc::UnstableSpiral: return "UnstableSpiral";
    case errc::NotClosed: return "NotClosed";
    case errc::CorridorAmbiguous: return "CorridorAmbiguous";
    case errc::NoStabilization: return "NoStabilization";
    case errc::SelfFoldedPresent: return "SelfFoldedPresent";
    case errc::Unclassifiable: return "Unclassifiable";
    case errc::DimensionMismatch: return "DimensionMismatch";
    case errc::UnsupportedDimension: return "UnsupportedDimension";
    case errc::UnknownExample: return "UnknownExample";
    case errc::IoFailure: return "IoFailure";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& detail) { throw error(code, detail); }

inline void require(bool cond, errc code, const std::string& detail) {
  if (!cond) fail(code, detail);
}

// Join a container of string-convertible items for diagnostics.
template <class Seq>
std::string join(const Seq& xs, const char* sep = ",") {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : xs) {
    if (!first) os << sep;
    first = false;
    os << x;
  }
  return os.str();
}

}  // namespace lamina
