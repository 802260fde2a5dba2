/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ltn/graph.hpp"
#include "ltn/numerics.hpp"

namespace ltn {

struct ReceiverTarget {
  NodeId receiver = 0;  // canonical label
  Matrix sigma_r;       // d x d
  Matrix sigma_rx;      // d x n
  double weight = 1.0;
  int dim() const { return static_cast<int>(sigma_r.rows()); }
};

struct SourceModel {
  std::vector<int> block_dims;  // one per source, canonical source order
  Matrix sigma_x;
  std::vector<ReceiverTarget> targets;  // one per receiver, canonical receiver order
  bool gaussian = true;

  int n() const;
  int block_offset(int source_index) const;
  int target_dim() const;
  // Receiver blocks placed on the diagonal; cross-receiver blocks are zero.
  Matrix sigma_r() const;
  Matrix sigma_rx() const;
};

// Checks symmetry, PSD-ness of sigma_x and of each joint (r_i, x) covariance,
// dimensions, and positive weights.
void validate_model(const SourceModel& model);

// Target r = A x for a receiver.
ReceiverTarget linear_target(NodeId receiver, const Matrix& sigma_x, const Matrix& a, double weight = 1.0);

// Selection matrix picking the block of source `source_index`.
Matrix block_selector(const std::vector<int>& block_dims, int source_index);

Matrix gauss_markov(int n, double rho);

// Diagonal 15 + 2U, off-diagonal 1 + 2U, resampled until positive definite.
Matrix hybrid_random_cov(int n, std::mt19937_64& rng, int max_tries = 1000);
Matrix hybrid_random_cov(int n, std::uint64_t seed);

struct InnovationPair {
  Matrix sigma_xi;
  Matrix sigma_nu;
  Matrix sigma_nu_xi;
};

// Residual covariances of x and r after linear estimation from side
// information s. A singular sigma_s falls back to a pseudo-inverse unless
// allow_pinv is false, in which case SingularSideInfo is thrown.
InnovationPair innovations(const Matrix& sigma_x, const Matrix& sigma_r, const Matrix& sigma_rx,
                           const Matrix& sigma_s, const Matrix& sigma_xs, const Matrix& sigma_rs,
                           bool allow_pinv = true);
InnovationPair innovations(const SourceModel& model, const Matrix& sigma_s, const Matrix& sigma_xs,
                           const Matrix& sigma_rs, bool allow_pinv = true);

// Diagonal matrix with sqrt(w_i) repeated over each receiver's target.
Matrix build_weight_matrix(const SourceModel& model);

// `count` weight ratios spaced uniformly in log scale over [lo, hi].
std::vector<double> weight_ratio_sweep(int count = 32, double lo = 0.01, double hi = 100.0);

}  // namespace ltn
