/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <optional>
#include <vector>

#include "ltn/numerics.hpp"

namespace ltn {

// argmin t^T P t + p^T t subject to Phi t = phi.
Vector solve_eq_qp(const Matrix& P, const Vector& p, const Matrix& phi_mat, const Vector& phi);

struct QuadIneq {
  Matrix Gamma;  // PSD
  double cap = 0.0;
};

// minimize t^T P t + p^T t + p0 subject to Phi t = phi and t^T Gamma_k t <= cap_k.
struct QcqpProblem {
  Matrix P;
  Vector p;
  double p0 = 0.0;
  Matrix eq_phi;  // equality constraint matrix (may have zero rows)
  Vector eq_rhs;
  std::vector<QuadIneq> quad_ineqs;
  // Optional strictly feasible or feasible point to start from.
  std::optional<Vector> warm_start;
};

struct QcqpResult {
  Vector t;
  double objective = 0.0;
  int newton_steps = 0;
};

QcqpResult solve_qcqp_detailed(const QcqpProblem& prob, double tol = 1e-10);
Vector solve_qcqp(const QcqpProblem& prob, double tol = 1e-10);

// Relaxed power-allocation program over Psi = L^T L:
//   minimize tr(epigraph_phi) + tr(W (Sigma_nu - Sigma_nu_xi Sigma_xi^-1 Sigma_xi_nu) W^T)
//   s.t. tr(Sigma_x Psi) <= P, Psi >= 0,
//        [[epigraph_phi, K], [K^T, Sigma_xi^-1 + Psi]] >= 0,  K = W Sigma_nu_xi Sigma_xi^-1.
struct SdpProblem {
  Matrix sigma_xi;
  Matrix sigma_nu;
  Matrix sigma_nu_xi;
  Matrix W;
  Matrix sigma_x;
  double P = 0.0;
};

struct SdpResult {
  double value = 0.0;
  Matrix psi;
  Matrix epigraph_phi;
  double gap = 0.0;  // certified bound on value - optimum
  int newton_steps = 0;
};

SdpResult solve_sdp_relaxation(const SdpProblem& prob, double tol = 1e-9);

}  // namespace ltn
