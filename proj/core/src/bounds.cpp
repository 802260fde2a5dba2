/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ltn/convex.hpp"
#include "ltn/error.hpp"

namespace ltn {

namespace {

constexpr double kBisectTol = 1e-10;
constexpr int kBisectIters = 200;

Matrix regularized_inverse(const Matrix& s) {
  const Eigen::Index n = s.rows();
  Matrix reg = 0.5 * (s + s.transpose());
  const double tr = reg.trace();
  if (n > 0 && min_eigenvalue(reg) <= 1e-10 * std::max(tr, 0.0) / static_cast<double>(n))
    reg += (tr > 0.0 ? 1e-10 * tr / static_cast<double>(n) : 1e-10) * Matrix::Identity(n, n);
  Eigen::LLT<Matrix> llt(reg);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "innovation covariance");
  return llt.solve(Matrix::Identity(n, n));
}

// Explained part W Sigma_nu_xi Sigma_xi^-1 Sigma_xi_nu W^T and the residual trace.
void split_target(const InnovationPair& in, const Matrix& W, Matrix& explained, double& residual) {
  if (W.cols() != in.sigma_nu.rows() || in.sigma_nu_xi.rows() != in.sigma_nu.rows() ||
      in.sigma_nu_xi.cols() != in.sigma_xi.rows())
    throw Error(ErrorCode::DimensionMismatch, "bound data");
  const Matrix k = W * in.sigma_nu_xi;
  explained = k * regularized_inverse(in.sigma_xi) * k.transpose();
  explained = 0.5 * (explained + explained.transpose());
  residual = (W * in.sigma_nu * W.transpose()).trace() - explained.trace();
}

double rate_at(const std::vector<double>& eigs, double theta) {
  double r = 0.0;
  for (double l : eigs)
    if (l > theta) r += 0.5 * std::log2(l / theta);
  return r;
}

Waterfill finish(const std::vector<double>& eigs, double theta) {
  Waterfill w;
  w.theta = theta;
  for (double l : eigs) w.components.push_back(std::min(theta, l));
  w.distortion = std::accumulate(w.components.begin(), w.components.end(), 0.0);
  w.rate = rate_at(eigs, theta);
  return w;
}

void check_eigs(const std::vector<double>& eigs) {
  if (eigs.empty()) throw Error(ErrorCode::InvalidArgument, "reverse water-filling needs eigenvalues");
  for (double l : eigs)
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "reverse water-filling needs positive eigenvalues");
}

}  // namespace

double ideal_bound(const InnovationPair& innov, const Matrix& W, int c) {
  if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative bandwidth");
  Matrix explained;
  double residual = 0.0;
  split_target(innov, W, explained, residual);
  const SymEig es = sym_eig(explained);
  double kept = 0.0;
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(c, es.eigenvalues.size()); ++j)
    kept += std::max(es.eigenvalues(j), 0.0);
  return std::max(0.0, (W * innov.sigma_nu * W.transpose()).trace() - kept);
}

double sdp_bound(const InnovationPair& innov, const Matrix& W, const Matrix& sigma_x, double P) {
  if (!(P >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative power");
  SdpProblem prob{innov.sigma_xi, innov.sigma_nu, innov.sigma_nu_xi, W, sigma_x, P};
  return std::max(0.0, solve_sdp_relaxation(prob).value);
}

double awgn_capacity(int c, double P) {
  if (c < 1) throw Error(ErrorCode::InvalidArgument, "awgn_capacity needs c >= 1");
  if (!(P >= 0.0)) throw Error(ErrorCode::InvalidArgument, "awgn_capacity needs P >= 0");
  return 0.5 * c * std::log2(1.0 + P / c);
}

Waterfill reverse_waterfill_distortion(const std::vector<double>& eigs, double D) {
  check_eigs(eigs);
  const double total = std::accumulate(eigs.begin(), eigs.end(), 0.0);
  if (!(D > 0.0) || D > total) throw Error(ErrorCode::TargetOutOfRange, "distortion outside (0, sum of eigenvalues]");
  double lo = 0.0, hi = *std::max_element(eigs.begin(), eigs.end());
  for (int it = 0; it < kBisectIters && hi - lo > kBisectTol; ++it) {
    const double mid = 0.5 * (lo + hi);
    double sum = 0.0;
    for (double l : eigs) sum += std::min(mid, l);
    (sum < D ? lo : hi) = mid;
  }
  // Close the bracket exactly on the active set the bisection identified.
  double theta = 0.5 * (lo + hi);
  double clipped = 0.0;
  int active = 0;
  for (double l : eigs) {
    if (l > theta) ++active;
    else clipped += l;
  }
  if (active > 0) theta = (D - clipped) / active;
  return finish(eigs, theta);
}

Waterfill reverse_waterfill_rate(const std::vector<double>& eigs, double R) {
  check_eigs(eigs);
  if (!(R >= 0.0) || !std::isfinite(R)) throw Error(ErrorCode::TargetOutOfRange, "rate must be finite and nonnegative");
  double lo = 0.0, hi = *std::max_element(eigs.begin(), eigs.end());
  if (R == 0.0) return finish(eigs, hi);
  for (int it = 0; it < kBisectIters && hi - lo > kBisectTol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rate_at(eigs, mid) > R ? lo : hi) = mid;
  }
  // Rate is exactly logarithmic in theta on a fixed active set.
  double theta = 0.5 * (lo + hi);
  double log_sum = 0.0;
  int active = 0;
  for (double l : eigs)
    if (l > theta) {
      ++active;
      log_sum += std::log2(l);
    }
  if (active > 0) theta = std::exp2((log_sum - 2.0 * R) / active);
  return finish(eigs, theta);
}

CutProblem cut_problem(const LtnGraph& g, const SourceModel& model, const Matrix& W, const Cut& cut,
                       bool require_power) {
  if (model.block_dims.size() != g.sources().size() || model.targets.size() != g.receivers().size())
    throw Error(ErrorCode::DimensionMismatch, "model does not match graph terminals");
  std::vector<int> f_idx, s_idx;
  for (size_t i = 0; i < g.sources().size(); ++i) {
    const int off = model.block_offset(static_cast<int>(i));
    auto& dst = cut.contains(g.sources()[i]) ? f_idx : s_idx;
    for (int k = 0; k < model.block_dims[i]; ++k) dst.push_back(off + k);
  }
  std::vector<int> r_idx;
  std::vector<const ReceiverTarget*> targets;
  int roff = 0;
  for (size_t i = 0; i < g.receivers().size(); ++i) {
    const int d = model.targets[i].dim();
    if (!cut.contains(g.receivers()[i])) {
      targets.push_back(&model.targets[i]);
      for (int k = 0; k < d; ++k) r_idx.push_back(roff + k);
    }
    roff += d;
  }
  auto pick = [](const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < cols.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    return out;
  };
  const Matrix sigma_r = model.sigma_r();
  const Matrix sigma_rx = model.sigma_rx();

  CutProblem cp;
  cp.sigma_x = pick(model.sigma_x, f_idx, f_idx);
  cp.innov = innovations(cp.sigma_x, pick(sigma_r, r_idx, r_idx), pick(sigma_rx, r_idx, f_idx),
                         pick(model.sigma_x, s_idx, s_idx), pick(model.sigma_x, f_idx, s_idx),
                         pick(sigma_rx, r_idx, s_idx));
  cp.W = pick(W, r_idx, r_idx);
  const CutCapacity cap = cut_capacity(g, cut, require_power);
  cp.bandwidth = cap.bandwidth;
  cp.power = cap.power;
  cp.noise_floor = std::numeric_limits<double>::infinity();
  for (const Edge& e : g.edges()) {
    if (!cut.contains(e.tail) || cut.contains(e.head)) continue;
    const double floor = e.noise_cov ? min_eigenvalue(*e.noise_cov) : 1.0;
    cp.noise_floor = std::min(cp.noise_floor, floor);
  }
  if (!std::isfinite(cp.noise_floor)) cp.noise_floor = 1.0;
  return cp;
}

namespace {

double effective_power(const CutProblem& cp) {
  return cp.noise_floor > 0.0 ? cp.power / cp.noise_floor : std::numeric_limits<double>::infinity();
}

double info_value(const CutProblem& cp) {
  Matrix explained;
  double residual = 0.0;
  split_target(cp.innov, cp.W, explained, residual);
  const SymEig es = sym_eig(explained);
  std::vector<double> eigs;
  const double top = es.eigenvalues.size() ? es.eigenvalues(0) : 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i)
    if (es.eigenvalues(i) > 1e-12 * std::max(top, 1e-300)) eigs.push_back(es.eigenvalues(i));
  residual = std::max(residual, 0.0);
  if (eigs.empty()) return residual;
  const double P = effective_power(cp);
  if (cp.bandwidth == 0) return residual + std::accumulate(eigs.begin(), eigs.end(), 0.0);
  if (!std::isfinite(P)) return residual;
  return residual + reverse_waterfill_rate(eigs, awgn_capacity(cp.bandwidth, P)).distortion;
}

double sdp_value(const CutProblem& cp) {
  const double P = effective_power(cp);
  if (!std::isfinite(P)) {
    Matrix explained;
    double residual = 0.0;
    split_target(cp.innov, cp.W, explained, residual);
    return std::max(residual, 0.0);
  }
  return sdp_bound(cp.innov, cp.W, cp.sigma_x, P);
}

}  // namespace

double info_bound(const LtnGraph& g, const SourceModel& model, const Matrix& W, const Cut& cut) {
  if (!model.gaussian) throw Error(ErrorCode::NonGaussianModel, "information bound needs jointly Gaussian sources");
  return info_value(cut_problem(g, model, W, cut, true));
}

CutsetScan cutset_scan(const LtnGraph& g, const SourceModel& model, const Matrix& W, bool noisy) {
  CutsetScan scan;
  const std::vector<Cut> cuts = enumerate_cuts(g);
  for (size_t i = 0; i < cuts.size(); ++i) {
    const CutProblem cp = cut_problem(g, model, W, cuts[i], noisy);
    BoundReport rep;
    rep.cut_id = static_cast<int>(i);
    rep.cut = cuts[i];
    rep.C_F = cp.bandwidth;
    rep.P_F = cp.power;
    rep.d_ideal = ideal_bound(cp.innov, cp.W, cp.bandwidth);
    rep.d_noisy_lb = rep.d_ideal;
    if (noisy) {
      rep.d_sdp = sdp_value(cp);
      rep.d_noisy_lb = std::max(rep.d_ideal, *rep.d_sdp);
      if (model.gaussian) rep.d_info = info_value(cp);
    }
    if (scan.tightest < 0 || rep.d_noisy_lb > scan.bound) {
      scan.tightest = static_cast<int>(i);
      scan.bound = rep.d_noisy_lb;
    }
    scan.reports.push_back(std::move(rep));
  }
  return scan;
}

}  // namespace ltn
