/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ltn/graph.hpp"
#include "ltn/numerics.hpp"
#include "ltn/source_model.hpp"
#include "ltn/transfer.hpp"

namespace ltn {

// B = Sigma_rx G^T (G Sigma_x G^T + Sigma_z)^-1. Throws SingularInnovationGram
// when the bracket is singular.
Matrix llse_decoder_noisy(const Matrix& G, const Matrix& sigma_x, const Matrix& sigma_rx, const Matrix& sigma_z);

struct PowerConstraint {
  int edge = -1;
  Matrix Gamma;  // over vec(T) of the single layer
  double cap = 0.0;
};

// One constraint per edge carrying a power cap, with
// t^T Gamma t = tr(L Sigma_{x_u} L^T). Throws MultiLayerUnsupported unless
// every edge joins a source to a receiver.
std::vector<PowerConstraint> power_matrices(const LtnGraph& graph, const SourceModel& model);

// Block-diagonal noise covariance of y = T x + z in receiver order. Edges
// without an explicit covariance carry unit-variance white noise.
Matrix receiver_noise(const LtnGraph& graph);

struct NoisyOptions {
  double eps = 1e-8;
  int max_iter = 500;
  int restarts = 20;
  std::uint64_t seed = 1;
  int threads = 0;
  double qcqp_tol = 1e-10;
  std::optional<EdgeTransforms> initial;  // used by restart 0 when set
};

struct NoisySolveState {
  EdgeTransforms transforms;
  Matrix T;
  std::vector<Matrix> decoders;
  int iterations = 0;
  std::vector<double> trace;
  double distortion = 0.0;
  std::vector<double> receiver_distortion;
  int restart = 0;
  std::vector<std::vector<double>> restart_traces;
};

NoisySolveState run_noisy(const LtnGraph& graph, const SourceModel& model, const Matrix& W,
                          const NoisyOptions& options, int restart);

NoisySolveState optimize_noisy(const LtnGraph& graph, const SourceModel& model, const Matrix& W,
                               const NoisyOptions& options = {});

}  // namespace ltn
