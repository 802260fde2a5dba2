/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <stdexcept>
#include <string>

namespace ltn {

enum class ErrorCode {
  CycleDetected,
  SourceHasInEdge,
  ReceiverHasOutEdge,
  ZeroBandwidth,
  UnknownNode,
  SourceReceiverOverlap,
  MissingPowerCap,
  InvalidArgument,
  GenerationFailed,
  SingularSideInfo,
  NonpositiveWeight,
  DimensionMismatch,
  NotNilpotent,
  InfeasibleConstraints,
  NotSymmetric,
  Infeasible,
  MaxIterExceeded,
  NumericalFailure,
  SingularInnovationGram,
  MultiLayerUnsupported,
  TargetOutOfRange,
  NonGaussianModel,
  UnsupportedTopology,
  ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ltn
