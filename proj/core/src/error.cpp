/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/error.hpp"

namespace ltn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::SourceHasInEdge: return "SourceHasInEdge";
    case ErrorCode::ReceiverHasOutEdge: return "ReceiverHasOutEdge";
    case ErrorCode::ZeroBandwidth: return "ZeroBandwidth";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::SourceReceiverOverlap: return "SourceReceiverOverlap";
    case ErrorCode::MissingPowerCap: return "MissingPowerCap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::SingularSideInfo: return "SingularSideInfo";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNilpotent: return "NotNilpotent";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::SingularInnovationGram: return "SingularInnovationGram";
    case ErrorCode::MultiLayerUnsupported: return "MultiLayerUnsupported";
    case ErrorCode::TargetOutOfRange: return "TargetOutOfRange";
    case ErrorCode::NonGaussianModel: return "NonGaussianModel";
    case ErrorCode::UnsupportedTopology: return "UnsupportedTopology";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace ltn
