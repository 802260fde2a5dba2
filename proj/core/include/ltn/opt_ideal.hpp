/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "ltn/graph.hpp"
#include "ltn/numerics.hpp"
#include "ltn/source_model.hpp"
#include "ltn/transfer.hpp"

namespace ltn {

// Source blocks must match the graph's sources and targets its receivers, in order.
void check_compatible(const LtnGraph& graph, const SourceModel& model);

// B = Sigma_rx G^T (G Sigma_x G^T)^+.
Matrix llse_decoder(const Matrix& G, const Matrix& sigma_x, const Matrix& sigma_rx);

// Block-diagonal stack of per-receiver decoders.
Matrix stack_decoders(const std::vector<Matrix>& decoders);

// Row counts of each receiver's block in y = T x.
std::vector<int> receiver_input_dims(const LtnGraph& graph);

// tr(W Sigma_r W^T) - 2 tr(W B T Sigma_xr W^T) + tr(W B (T Sigma_x T^T + Sigma_z) B^T W^T).
// `noise_y` may be empty for a noiseless network.
double weighted_mse(const SourceModel& model, const Matrix& W, const Matrix& T, const Matrix& B,
                    const Matrix& noise_y = Matrix());

// Unweighted MSE of each receiver for the given end-to-end map and decoders.
std::vector<double> receiver_mse(const SourceModel& model, const std::vector<int>& input_dims, const Matrix& T,
                                 const std::vector<Matrix>& decoders, const Matrix& noise_y = Matrix());

// D(t) = t^T P t + p^T t + scalar for t = vec(layers[layer]), others fixed.
struct QuadCoeffs {
  Matrix P;
  Vector p;
  double scalar = 0.0;
};

QuadCoeffs quad_coeffs(const FactoredTransform& ft, int layer, const Matrix& B, const Matrix& W,
                       const SourceModel& model);

struct IdealOptions {
  double eps = 1e-8;
  int max_iter = 500;
  int restarts = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 picks hardware concurrency
  std::optional<EdgeTransforms> initial;  // used by restart 0 when set
};

struct IdealSolveState {
  FactoredTransform transform;
  EdgeTransforms transforms;
  std::vector<Matrix> decoders;
  int iterations = 0;
  std::vector<double> trace;  // D(0), D(1), ...
  double distortion = 0.0;
  std::vector<double> receiver_distortion;
  int restart = 0;
  std::vector<std::vector<double>> restart_traces;  // filled by optimize_ideal
};

// Deterministic per-restart generator.
std::mt19937_64 restart_rng(std::uint64_t seed, int restart);

// Alternating minimization from one random start.
IdealSolveState run_ideal(const LtnGraph& graph, const SourceModel& model, const Matrix& W,
                          const IdealOptions& options, int restart);

// Best of options.restarts independent runs, ties broken by restart index.
IdealSolveState optimize_ideal(const LtnGraph& graph, const SourceModel& model, const Matrix& W,
                               const IdealOptions& options = {});

// Runs fn(0..count-1) on up to `threads` worker threads.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace ltn
