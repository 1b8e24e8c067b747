#pragma once

#include <stdexcept>
#include <string>

namespace ctr {

enum class ErrorCode {
  TooFewVertices,
  NonSimplePolygon,
  BadCorners,
  RefinementFailure,
  PointOutsideMesh,
  DegenerateSide,
  SolverDivergence,
  NonBijectiveMap,
  EmptyInstance,
  ModelFeatureMismatch,
  SingleClassData,
  InsufficientData,
  ZeroVector,
  SelfIntersectingParams,
  FormatError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ctr
