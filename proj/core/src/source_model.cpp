/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/source_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ltn/error.hpp"

namespace ltn {

int SourceModel::n() const { return std::accumulate(block_dims.begin(), block_dims.end(), 0); }

int SourceModel::block_offset(int source_index) const {
  return std::accumulate(block_dims.begin(), block_dims.begin() + source_index, 0);
}

int SourceModel::target_dim() const {
  int d = 0;
  for (const auto& t : targets) d += t.dim();
  return d;
}

Matrix SourceModel::sigma_r() const {
  const int d = target_dim();
  Matrix out = Matrix::Zero(d, d);
  int off = 0;
  for (const auto& t : targets) {
    out.block(off, off, t.dim(), t.dim()) = t.sigma_r;
    off += t.dim();
  }
  return out;
}

Matrix SourceModel::sigma_rx() const {
  Matrix out(target_dim(), n());
  int off = 0;
  for (const auto& t : targets) {
    out.middleRows(off, t.dim()) = t.sigma_rx;
    off += t.dim();
  }
  return out;
}

namespace {

void require_symmetric(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, what + " is not square");
  if (m.size() && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotSymmetric, what);
}

}  // namespace

void validate_model(const SourceModel& model) {
  const int n = model.n();
  for (int d : model.block_dims)
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "source block dimension must be positive");
  require_symmetric(model.sigma_x, "sigma_x");
  if (model.sigma_x.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "sigma_x is " + std::to_string(model.sigma_x.rows()) +
                                                  " but source blocks sum to " + std::to_string(n));
  if (!is_psd(model.sigma_x)) throw Error(ErrorCode::InvalidArgument, "sigma_x is not PSD");
  for (const auto& t : model.targets) {
    if (!(t.weight > 0.0)) throw Error(ErrorCode::NonpositiveWeight, "receiver weight " + std::to_string(t.weight));
    require_symmetric(t.sigma_r, "sigma_r");
    if (t.sigma_rx.rows() != t.dim() || t.sigma_rx.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "sigma_rx shape");
    Matrix joint(t.dim() + n, t.dim() + n);
    joint << t.sigma_r, t.sigma_rx, t.sigma_rx.transpose(), model.sigma_x;
    if (!is_psd(joint, 1e-9)) throw Error(ErrorCode::InvalidArgument, "joint covariance of (r, x) is not PSD");
  }
}

ReceiverTarget linear_target(NodeId receiver, const Matrix& sigma_x, const Matrix& a, double weight) {
  if (a.cols() != sigma_x.rows()) throw Error(ErrorCode::DimensionMismatch, "target map width");
  ReceiverTarget t;
  t.receiver = receiver;
  t.sigma_rx = a * sigma_x;
  t.sigma_r = t.sigma_rx * a.transpose();
  t.sigma_r = 0.5 * (t.sigma_r + t.sigma_r.transpose());
  t.weight = weight;
  return t;
}

Matrix block_selector(const std::vector<int>& block_dims, int source_index) {
  const int n = std::accumulate(block_dims.begin(), block_dims.end(), 0);
  const int off = std::accumulate(block_dims.begin(), block_dims.begin() + source_index, 0);
  const int d = block_dims.at(static_cast<size_t>(source_index));
  Matrix s = Matrix::Zero(d, n);
  s.middleCols(off, d).setIdentity();
  return s;
}

Matrix gauss_markov(int n, double rho) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gauss_markov needs n >= 1");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::InvalidArgument, "gauss_markov needs |rho| < 1");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
  return m;
}

Matrix hybrid_random_cov(int n, std::mt19937_64& rng, int max_tries) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "hybrid_random_cov needs n >= 1");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = 15.0 + 2.0 * u(rng);
      for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = 1.0 + 2.0 * u(rng);
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() == Eigen::Success && min_eigenvalue(m) > 0.0) return m;
  }
  throw Error(ErrorCode::GenerationFailed, "no positive definite draw in " + std::to_string(max_tries) + " attempts");
}

Matrix hybrid_random_cov(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return hybrid_random_cov(n, rng);
}

InnovationPair innovations(const Matrix& sigma_x, const Matrix& sigma_r, const Matrix& sigma_rx,
                           const Matrix& sigma_s, const Matrix& sigma_xs, const Matrix& sigma_rs,
                           bool allow_pinv) {
  const auto ns = sigma_s.rows();
  if (sigma_xs.rows() != sigma_x.rows() || sigma_xs.cols() != ns || sigma_rs.rows() != sigma_r.rows() ||
      sigma_rs.cols() != ns || sigma_rx.rows() != sigma_r.rows() || sigma_rx.cols() != sigma_x.rows())
    throw Error(ErrorCode::DimensionMismatch, "innovations: covariance blocks do not conform");
  InnovationPair out;
  if (ns == 0) {
    out.sigma_xi = sigma_x;
    out.sigma_nu = sigma_r;
    out.sigma_nu_xi = sigma_rx;
    return out;
  }
  Matrix s_inv;
  Eigen::LLT<Matrix> llt(sigma_s);
  const bool regular = llt.info() == Eigen::Success &&
                       min_eigenvalue(sigma_s) > kRankTol * std::max(1.0, sigma_s.cwiseAbs().maxCoeff());
  if (regular) {
    s_inv = llt.solve(Matrix::Identity(ns, ns));
  } else {
    if (!allow_pinv) throw Error(ErrorCode::SingularSideInfo, "side-information covariance is singular");
    s_inv = pinv(sigma_s);
  }
  out.sigma_xi = sigma_x - sigma_xs * s_inv * sigma_xs.transpose();
  out.sigma_nu = sigma_r - sigma_rs * s_inv * sigma_rs.transpose();
  out.sigma_nu_xi = sigma_rx - sigma_rs * s_inv * sigma_xs.transpose();
  out.sigma_xi = 0.5 * (out.sigma_xi + out.sigma_xi.transpose());
  out.sigma_nu = 0.5 * (out.sigma_nu + out.sigma_nu.transpose());
  return out;
}

InnovationPair innovations(const SourceModel& model, const Matrix& sigma_s, const Matrix& sigma_xs,
                           const Matrix& sigma_rs, bool allow_pinv) {
  return innovations(model.sigma_x, model.sigma_r(), model.sigma_rx(), sigma_s, sigma_xs, sigma_rs, allow_pinv);
}

Matrix build_weight_matrix(const SourceModel& model) {
  Vector diag(model.target_dim());
  int off = 0;
  for (const auto& t : model.targets) {
    if (!(t.weight > 0.0)) throw Error(ErrorCode::NonpositiveWeight, std::to_string(t.weight));
    diag.segment(off, t.dim()).setConstant(std::sqrt(t.weight));
    off += t.dim();
  }
  return diag.asDiagonal();
}

std::vector<double> weight_ratio_sweep(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::InvalidArgument, "weight sweep range");
  std::vector<double> out;
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < count; ++k)
    out.push_back(count == 1 ? lo : std::exp(a + (b - a) * k / (count - 1)));
  return out;
}

}  // namespace ltn
