/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ltn/error.hpp"

namespace ltn {

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != v.size())
    throw Error(ErrorCode::DimensionMismatch, "unvec: size " + std::to_string(v.size()) +
                                                  " does not factor as " + std::to_string(rows) +
                                                  "x" + std::to_string(cols));
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SymEig sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NotSymmetric, "sym_eig: matrix is not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (a.size() > 0 && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::NotSymmetric, "sym_eig: asymmetry exceeds 1e-12");

  SymEig out;
  const Eigen::Index n = a.rows();
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "sym_eig did not converge");

  // Eigen returns ascending order; a stable sort keeps the solver's order on ties.
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Vector& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ev(x) > ev(y); });
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = ev(order[static_cast<size_t>(k)]);
    out.eigenvectors.col(k) = es.eigenvectors().col(order[static_cast<size_t>(k)]);
  }
  return out;
}

Matrix pinv(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = rel_tol * (s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const Matrix& a, double tol) {
  const double scale = a.size() ? std::max(1.0, a.cwiseAbs().maxCoeff()) : 1.0;
  return min_eigenvalue(a) >= -tol * scale;
}

bool is_canonical_pinning(const Matrix& phi) {
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    int nnz = 0;
    for (Eigen::Index c = 0; c < phi.cols(); ++c)
      if (phi(r, c) != 0.0) ++nnz;
    if (nnz != 1) return false;
  }
  return true;
}

namespace {

// A minimizer of x^T H x / 2 + g^T x. Only the eigen fallback is min-norm.
Vector psd_solve(const Matrix& h, const Vector& g) {
  if (h.rows() == 0) return Vector();
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(-g);
    const double res = (h * x + g).norm();
    if (std::isfinite(res) && res <= 1e-9 * std::max(1.0, g.norm())) return x;
  }
  // Pivoted LDLT drops negligible pivots, which covers the usual rank-deficient case.
  Eigen::LDLT<Matrix> ldlt(h);
  if (ldlt.info() == Eigen::Success) {
    Vector x = ldlt.solve(-g);
    const double res = (h * x + g).norm();
    if (std::isfinite(res) && res <= 1e-9 * std::max(1.0, g.norm())) return x;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector& ev = es.eigenvalues();
  const double cutoff = kRankTol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  Vector coeff = es.eigenvectors().transpose() * (-g);
  for (Eigen::Index i = 0; i < ev.size(); ++i) coeff(i) = ev(i) > cutoff ? coeff(i) / ev(i) : 0.0;
  return es.eigenvectors() * coeff;
}

}  // namespace

KktSolution solve_kkt(const Matrix& P, const Vector& p, const Matrix& phi_mat, const Vector& phi) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n || p.size() != n || phi_mat.cols() != n || phi_mat.rows() != phi.size())
    throw Error(ErrorCode::DimensionMismatch, "solve_kkt: inconsistent block sizes");
  const double feas_tol = 1e-9 * std::max(1.0, phi.size() ? phi.cwiseAbs().maxCoeff() : 1.0);

  KktSolution out;
  out.t = Vector::Zero(n);

  if (is_canonical_pinning(phi_mat)) {
    std::vector<char> pinned(static_cast<size_t>(n), 0);
    for (Eigen::Index r = 0; r < phi_mat.rows(); ++r) {
      Eigen::Index c = 0;
      while (phi_mat(r, c) == 0.0) ++c;
      const double value = phi(r) / phi_mat(r, c);
      if (pinned[static_cast<size_t>(c)] && std::abs(out.t(c) - value) > feas_tol)
        throw Error(ErrorCode::InfeasibleConstraints, "conflicting pins on entry " + std::to_string(c));
      pinned[static_cast<size_t>(c)] = 1;
      out.t(c) = value;
    }
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!pinned[static_cast<size_t>(i)]) free_idx.push_back(i);
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    Matrix h(nf, nf);
    Vector g(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      g(a) = p(free_idx[a]) + 2.0 * P.row(free_idx[a]).dot(out.t);
      for (Eigen::Index b = 0; b < nf; ++b) h(a, b) = 2.0 * P(free_idx[a], free_idx[b]);
    }
    const Vector tf = psd_solve(h, g);
    for (Eigen::Index a = 0; a < nf; ++a) out.t(free_idx[a]) = tf(a);
  } else {
    // Null-space method: t = t0 + N y with t0 the min-norm feasible point.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(phi_mat);
    cod.setThreshold(kRankTol);
    const Vector t0 = phi_mat.rows() ? Vector(cod.solve(phi)) : Vector::Zero(n);
    if ((phi_mat * t0 - phi).norm() > feas_tol * std::sqrt(static_cast<double>(phi.size()) + 1.0))
      throw Error(ErrorCode::InfeasibleConstraints, "Phi t = phi has no solution");
    Eigen::JacobiSVD<Matrix> svd(phi_mat, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double cutoff = kRankTol * (s.size() ? s(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cutoff && s(i) > 0.0) ++rank;
    const Matrix N = phi_mat.rows() ? Matrix(svd.matrixV().rightCols(n - rank)) : Matrix::Identity(n, n);
    const Vector y = psd_solve(2.0 * N.transpose() * P * N, N.transpose() * (p + 2.0 * P * t0));
    out.t = t0 + N * y;
  }

  if (phi_mat.rows() > 0) {
    // Phi^T lambda = -(2 P t + p) in the least-squares sense.
    const Vector rhs = -(2.0 * P * out.t + p);
    Eigen::CompleteOrthogonalDecomposition<Matrix> codt(phi_mat.transpose());
    out.lambda = codt.solve(rhs);
  }
  return out;
}

Matrix duplication_matrix(Eigen::Index n) {
  Matrix d = Matrix::Zero(n * n, n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i, ++k) {
      d(j * n + i, k) = 1.0;
      d(i * n + j, k) = 1.0;
    }
  return d;
}

}  // namespace ltn
