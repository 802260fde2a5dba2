/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/convex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ltn/error.hpp"

namespace ltn {

Vector solve_eq_qp(const Matrix& P, const Vector& p, const Matrix& phi_mat, const Vector& phi) {
  return solve_kkt(P, p, phi_mat, phi).t;
}

namespace {

constexpr int kMaxNewtonSteps = 20000;

// Solves H d = -g for symmetric PSD H, falling back to a pseudo-inverse.
Vector newton_direction(const Matrix& h, const Vector& g) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() == Eigen::Success) {
    Vector d = llt.solve(-g);
    if (d.allFinite()) return d;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector& ev = es.eigenvalues();
  const double cutoff = 1e-13 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Vector c = es.eigenvectors().transpose() * (-g);
  for (Eigen::Index i = 0; i < ev.size(); ++i) c(i) = ev(i) > cutoff ? c(i) / ev(i) : 0.0;
  return es.eigenvectors() * c;
}

// minimize z^T Q z + q^T z  s.t.  z^T A_k z + 2 b_k^T z + e_k <= 0, from a strictly
// feasible z, by the log-barrier method.
struct BarrierProblem {
  Matrix Q;
  Vector q;
  std::vector<Matrix> A;
  std::vector<Vector> b;
  std::vector<double> e;

  double g(size_t k, const Vector& z) const { return z.dot(A[k] * z) + 2.0 * b[k].dot(z) + e[k]; }
  double f(const Vector& z) const { return z.dot(Q * z) + q.dot(z); }
  bool strictly_feasible(const Vector& z) const {
    for (size_t k = 0; k < A.size(); ++k)
      if (!(g(k, z) < 0.0)) return false;
    return true;
  }
  double barrier(double tau, const Vector& z) const {
    double v = tau * f(z);
    for (size_t k = 0; k < A.size(); ++k) v -= std::log(-g(k, z));
    return v;
  }
};

// The tau for which z is closest to the central path, in the least-squares
// sense on the centering gradient; clamped to [1, m / tol].
double central_tau(const BarrierProblem& bp, const Vector& z, double tol) {
  const Vector gf = 2.0 * bp.Q * z + bp.q;
  Vector gb = Vector::Zero(z.size());
  for (size_t k = 0; k < bp.A.size(); ++k) gb += 2.0 * (bp.A[k] * z + bp.b[k]) / (-bp.g(k, z));
  const double denom = gf.squaredNorm();
  const double hi = static_cast<double>(bp.A.size()) / tol;
  if (!(denom > 0.0)) return 1.0;
  return std::clamp(-gf.dot(gb) / denom, 1.0, hi);
}

int barrier_solve(const BarrierProblem& bp, Vector& z, double tol, const std::function<bool(const Vector&)>& stop,
                  double tau0 = 1.0) {
  const auto m = static_cast<double>(bp.A.size());
  double tau = tau0;
  int steps = 0;
  for (;;) {
    for (int inner = 0; inner < 200; ++inner) {
      Vector grad = tau * (2.0 * bp.Q * z + bp.q);
      Matrix hess = 2.0 * tau * bp.Q;
      for (size_t k = 0; k < bp.A.size(); ++k) {
        const double gk = bp.g(k, z);
        const Vector dg = 2.0 * (bp.A[k] * z + bp.b[k]);
        grad += dg / (-gk);
        hess += 2.0 * bp.A[k] / (-gk) + dg * dg.transpose() / (gk * gk);
      }
      const Vector d = newton_direction(hess, grad);
      const double decrement = -grad.dot(d);
      const double phi0 = bp.barrier(tau, z);
      // Below this the decrement is roundoff in phi0.
      if (!(decrement > std::max(2e-12, 1e-14 * std::abs(phi0)))) break;
      double alpha = 1.0;
      int halvings = 0;
      while (halvings < 80 && !bp.strictly_feasible(z + alpha * d)) {
        alpha *= 0.5;
        ++halvings;
      }
      while (halvings < 80 && bp.barrier(tau, z + alpha * d) > phi0 - 0.25 * alpha * decrement) {
        alpha *= 0.5;
        ++halvings;
      }
      if (halvings >= 80) break;
      z += alpha * d;
      if (++steps > kMaxNewtonSteps) throw Error(ErrorCode::MaxIterExceeded, "barrier Newton iterations");
      if (stop && stop(z)) return steps;
    }
    if (m / tau <= tol) return steps;
    tau *= 10.0;
  }
}

}  // namespace

QcqpResult solve_qcqp_detailed(const QcqpProblem& prob, double tol) {
  const Eigen::Index n = prob.P.rows();
  if (prob.P.cols() != n || prob.p.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "qcqp objective");
  Matrix eq = prob.eq_phi.size() ? prob.eq_phi : Matrix(0, n);
  Vector rhs = prob.eq_rhs.size() ? prob.eq_rhs : Vector(0);
  if (eq.cols() != n || eq.rows() != rhs.size()) throw Error(ErrorCode::DimensionMismatch, "qcqp equalities");

  // A zero cap on a PSD form forces Gamma t = 0, which is linear.
  std::vector<const QuadIneq*> active;
  for (const QuadIneq& qi : prob.quad_ineqs) {
    if (qi.Gamma.rows() != n || qi.Gamma.cols() != n) throw Error(ErrorCode::DimensionMismatch, "qcqp Gamma");
    if (qi.cap < 0.0) throw Error(ErrorCode::Infeasible, "negative cap on a PSD quadratic form");
    if (qi.cap > 0.0) {
      active.push_back(&qi);
      continue;
    }
    const SymEig es = sym_eig(0.5 * (qi.Gamma + qi.Gamma.transpose()));
    const double cutoff = kRankTol * std::max(es.eigenvalues.size() ? es.eigenvalues(0) : 0.0, 0.0);
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
      if (!(es.eigenvalues(k) > cutoff)) continue;
      eq.conservativeResize(eq.rows() + 1, Eigen::NoChange);
      rhs.conservativeResize(rhs.size() + 1);
      eq.row(eq.rows() - 1) = es.eigenvectors.col(k).transpose();
      rhs(rhs.size() - 1) = 0.0;
    }
  }

  // Affine parametrization t = t0 + N y of the equality-feasible set.
  Vector t0 = Vector::Zero(n);
  Matrix N;
  const double feas_tol = 1e-9 * std::max(1.0, rhs.size() ? rhs.cwiseAbs().maxCoeff() : 1.0);
  if (is_canonical_pinning(eq)) {
    std::vector<char> pinned(static_cast<size_t>(n), 0);
    for (Eigen::Index r = 0; r < eq.rows(); ++r) {
      Eigen::Index c = 0;
      while (eq(r, c) == 0.0) ++c;
      const double v = rhs(r) / eq(r, c);
      if (pinned[static_cast<size_t>(c)] && std::abs(t0(c) - v) > feas_tol)
        throw Error(ErrorCode::Infeasible, "conflicting equality pins");
      pinned[static_cast<size_t>(c)] = 1;
      t0(c) = v;
    }
    const auto nf = static_cast<Eigen::Index>(std::count(pinned.begin(), pinned.end(), 0));
    N = Matrix::Zero(n, nf);
    for (Eigen::Index i = 0, k = 0; i < n; ++i)
      if (!pinned[static_cast<size_t>(i)]) N(i, k++) = 1.0;
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(eq);
    cod.setThreshold(kRankTol);
    t0 = cod.solve(rhs);
    if ((eq * t0 - rhs).norm() > feas_tol * std::sqrt(static_cast<double>(rhs.size()) + 1.0))
      throw Error(ErrorCode::Infeasible, "equality constraints are inconsistent");
    Eigen::JacobiSVD<Matrix> svd(eq, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > kRankTol * s(0) && s(i) > 0.0) ++rank;
    N = svd.matrixV().rightCols(n - rank);
  }

  BarrierProblem bp;
  bp.Q = N.transpose() * prob.P * N;
  bp.Q = 0.5 * (bp.Q + bp.Q.transpose());
  bp.q = N.transpose() * (2.0 * prob.P * t0 + prob.p);
  for (const QuadIneq* qi : active) {
    bp.A.push_back(N.transpose() * qi->Gamma * N);
    bp.b.push_back(N.transpose() * qi->Gamma * t0);
    bp.e.push_back(t0.dot(qi->Gamma * t0) - qi->cap);
  }

  QcqpResult out;
  Vector y = Vector::Zero(N.cols());
  if (bp.A.empty()) {
    y = solve_kkt(bp.Q, bp.q, Matrix(0, N.cols()), Vector(0)).t;
  } else {
    bool started = false;
    if (prob.warm_start) {
      if (prob.warm_start->size() != n) throw Error(ErrorCode::DimensionMismatch, "warm start");
      // Pull the warm start slightly toward the anchor so it is strictly interior.
      const Vector yw = 0.99 * (N.transpose() * (*prob.warm_start - t0));
      if (bp.strictly_feasible(yw)) {
        y = yw;
        started = true;
      }
    }
    if (!started && !bp.strictly_feasible(y)) {
      // Phase I: minimize s subject to g_k(y) <= s.
      const Eigen::Index k = N.cols();
      BarrierProblem ph;
      ph.Q = Matrix::Zero(k + 1, k + 1);
      ph.q = Vector::Zero(k + 1);
      ph.q(k) = 1.0;
      double s0 = 0.0;
      for (size_t j = 0; j < bp.A.size(); ++j) {
        Matrix a = Matrix::Zero(k + 1, k + 1);
        a.topLeftCorner(k, k) = bp.A[j];
        Vector b = Vector::Zero(k + 1);
        b.head(k) = bp.b[j];
        b(k) = -0.5;
        ph.A.push_back(std::move(a));
        ph.b.push_back(std::move(b));
        ph.e.push_back(bp.e[j]);
        s0 = std::max(s0, bp.e[j]);
      }
      Vector z = Vector::Zero(k + 1);
      z(k) = s0 + 1.0;
      out.newton_steps += barrier_solve(ph, z, 1e-12, [&](const Vector& v) { return v(k) < 0.0; });
      y = z.head(k);
      if (!bp.strictly_feasible(y)) throw Error(ErrorCode::Infeasible, "no strictly feasible point for the power constraints");
    }
    out.newton_steps += barrier_solve(bp, y, tol, {}, started ? central_tau(bp, y, tol) : 1.0);
  }
  out.t = t0 + N * y;
  out.objective = out.t.dot(prob.P * out.t) + prob.p.dot(out.t) + prob.p0;
  return out;
}

Vector solve_qcqp(const QcqpProblem& prob, double tol) { return solve_qcqp_detailed(prob, tol).t; }

SdpResult solve_sdp_relaxation(const SdpProblem& prob, double tol) {
  const Eigen::Index n = prob.sigma_xi.rows();
  if (prob.sigma_xi.cols() != n || prob.sigma_x.rows() != n || prob.sigma_x.cols() != n ||
      prob.sigma_nu_xi.cols() != n || prob.sigma_nu_xi.rows() != prob.sigma_nu.rows() ||
      prob.W.cols() != prob.sigma_nu.rows())
    throw Error(ErrorCode::DimensionMismatch, "sdp data");
  if (!(prob.P >= 0.0)) throw Error(ErrorCode::Infeasible, "negative power budget");

  Matrix S = 0.5 * (prob.sigma_xi + prob.sigma_xi.transpose());
  const double tr = S.trace();
  if (n > 0 && min_eigenvalue(S) <= 1e-10 * std::max(tr, 0.0) / static_cast<double>(n)) {
    const double ridge = tr > 0.0 ? 1e-10 * tr / static_cast<double>(n) : 1e-10;
    S += ridge * Matrix::Identity(n, n);
  }
  Eigen::LLT<Matrix> sllt(S);
  if (sllt.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "innovation covariance not invertible");
  const Matrix S_inv = sllt.solve(Matrix::Identity(n, n));
  const Matrix K = prob.W * prob.sigma_nu_xi * S_inv;
  const Matrix A = K.transpose() * K;
  const double constant =
      (prob.W * (prob.sigma_nu - prob.sigma_nu_xi * S_inv * prob.sigma_nu_xi.transpose()) * prob.W.transpose()).trace();

  SdpResult out;
  auto finish = [&](const Matrix& psi) {
    const Matrix X = (S_inv + psi).inverse();
    out.psi = psi;
    out.epigraph_phi = K * X * K.transpose();
    out.value = out.epigraph_phi.trace() + constant;
    return out;
  };
  if (n == 0) return finish(Matrix(0, 0));
  const double sx_tr = prob.sigma_x.trace();
  if (prob.P == 0.0 || A.cwiseAbs().maxCoeff() == 0.0) return finish(Matrix::Zero(n, n));
  if (!(sx_tr > 0.0)) throw Error(ErrorCode::NumericalFailure, "power constraint does not bound Psi");

  const Matrix D = duplication_matrix(n);
  const Vector sx_vec = vec(prob.sigma_x);
  Matrix psi = (0.5 * prob.P / sx_tr) * Matrix::Identity(n, n);

  auto slack = [&](const Matrix& ps) { return prob.P - (prob.sigma_x.cwiseProduct(ps)).sum(); };
  auto barrier = [&](double tau, const Matrix& ps, double& value) {
    Eigen::LLT<Matrix> pl(ps);
    const double s = slack(ps);
    if (pl.info() != Eigen::Success || !(s > 0.0)) return false;
    const Matrix X = (S_inv + ps).inverse();
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(pl.matrixL()(i, i));
    value = tau * (A.cwiseProduct(X)).sum() - logdet - std::log(s);
    return std::isfinite(value);
  };

  const double nu = static_cast<double>(n) + 1.0;
  double tau = 1.0;
  int steps = 0;
  for (;;) {
    for (int inner = 0; inner < 200; ++inner) {
      const Matrix X = (S_inv + psi).inverse();
      const Matrix psi_inv = psi.inverse();
      const double s = slack(psi);
      const Matrix M = X * A * X;
      const Matrix G = -tau * M - psi_inv + prob.sigma_x / s;
      const Matrix H = tau * (kron(M, X) + kron(X, M)) + kron(psi_inv, psi_inv) + sx_vec * sx_vec.transpose() / (s * s);
      const Matrix Hh = D.transpose() * H * D;
      const Vector gh = D.transpose() * vec(0.5 * (G + G.transpose()));
      const Vector dh = newton_direction(0.5 * (Hh + Hh.transpose()), gh);
      const double decrement = -gh.dot(dh);
      if (!(decrement > 1e-12)) break;
      Matrix dpsi = unvec(D * dh, n, n);
      dpsi = 0.5 * (dpsi + dpsi.transpose());
      double phi0 = 0.0;
      barrier(tau, psi, phi0);
      double alpha = 1.0, trial = 0.0;
      int halvings = 0;
      while (halvings < 80 && (!barrier(tau, psi + alpha * dpsi, trial) || trial > phi0 - 0.25 * alpha * decrement)) {
        alpha *= 0.5;
        ++halvings;
      }
      if (halvings >= 80) break;
      psi += alpha * dpsi;
      if (++steps > kMaxNewtonSteps) throw Error(ErrorCode::MaxIterExceeded, "sdp barrier iterations");
    }
    if (nu / tau <= tol) break;
    tau *= 10.0;
  }
  out.newton_steps = steps;
  out.gap = nu / tau;
  finish(0.5 * (psi + psi.transpose()));
  if (!std::isfinite(out.value)) throw Error(ErrorCode::NumericalFailure, "sdp value is not finite");
  return out;
}

}  // namespace ltn
