/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <Eigen/Dense>

namespace ltn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative singular-value cutoff used for pseudo-inverses and rank decisions.
inline constexpr double kRankTol = 1e-10;

// Column-stacking vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

Matrix kron(const Matrix& a, const Matrix& b);

struct SymEig {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // orthonormal columns, same order
};

// Throws NotSymmetric when |A - A^T| exceeds 1e-12 * max(1, |A|).
SymEig sym_eig(const Matrix& a);

Matrix pinv(const Matrix& a, double rel_tol = kRankTol);

// Smallest eigenvalue of the symmetric part; used for PSD checks.
double min_eigenvalue(const Matrix& a);
bool is_psd(const Matrix& a, double tol = 1e-10);

// Returns true when every row of phi has exactly one nonzero entry.
bool is_canonical_pinning(const Matrix& phi);

struct KktSolution {
  Vector t;
  Vector lambda;
};

// Solves [[2P, Phi^T], [Phi, 0]] [t; lambda] = [-p; phi]. A singular system
// yields the minimum-norm optimizer. Throws InfeasibleConstraints when
// Phi t = phi has no solution.
KktSolution solve_kkt(const Matrix& P, const Vector& p, const Matrix& phi_mat, const Vector& phi);

// Duplication matrix D_n with vec(S) = D_n vech(S) for symmetric S.
Matrix duplication_matrix(Eigen::Index n);

}  // namespace ltn
