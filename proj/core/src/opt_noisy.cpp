/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/opt_noisy.hpp"

#include <cmath>
#include <string>

#include "ltn/convex.hpp"
#include "ltn/error.hpp"
#include "ltn/opt_ideal.hpp"

namespace ltn {

Matrix llse_decoder_noisy(const Matrix& G, const Matrix& sigma_x, const Matrix& sigma_rx, const Matrix& sigma_z) {
  if (G.cols() != sigma_x.rows() || sigma_z.rows() != G.rows() || sigma_z.cols() != G.rows())
    throw Error(ErrorCode::DimensionMismatch, "llse_decoder_noisy");
  Matrix m = G * sigma_x * G.transpose() + sigma_z;
  m = 0.5 * (m + m.transpose());
  if (m.rows() == 0) return Matrix::Zero(sigma_rx.rows(), 0);
  Eigen::LLT<Matrix> llt(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (llt.info() != Eigen::Success || min_eigenvalue(m) <= kRankTol * scale)
    throw Error(ErrorCode::SingularInnovationGram, "G Sigma_x G^T + Sigma_z is singular");
  return llt.solve(G * sigma_rx.transpose()).transpose();
}

namespace {

FactoredTransform single_layer_structure(const LtnGraph& g, const SourceModel& model) {
  for (const Edge& e : g.edges())
    if (!g.is_source(e.tail) || !g.is_receiver(e.head))
      throw Error(ErrorCode::MultiLayerUnsupported, "noisy design needs every edge to join a source to a receiver");
  const Layering lay = layer_partition(g);
  FactoredTransform ft = factor_structure(g, lay, model.block_dims);
  if (ft.num_layers() != 1) throw Error(ErrorCode::MultiLayerUnsupported, "network is not single-layer");
  return ft;
}

}  // namespace

Matrix receiver_noise(const LtnGraph& g) {
  int d = 0;
  for (NodeId r : g.receivers()) d += degrees(g, r).first;
  Matrix z = Matrix::Zero(d, d);
  int off = 0;
  for (NodeId r : g.receivers())
    for (int e : g.in_edges(r)) {
      const Edge& ed = g.edge(e);
      if (ed.noise_cov) z.block(off, off, ed.bandwidth, ed.bandwidth) = *ed.noise_cov;
      else z.block(off, off, ed.bandwidth, ed.bandwidth).setIdentity();
      off += ed.bandwidth;
    }
  return z;
}

std::vector<PowerConstraint> power_matrices(const LtnGraph& g, const SourceModel& model) {
  check_compatible(g, model);
  const FactoredTransform ft = single_layer_structure(g, model);
  const LayerMask& mask = ft.masks[0];
  const Eigen::Index d = mask.rows;
  std::vector<PowerConstraint> out;
  int row = 0;
  for (int e : ft.boundary_edges[0]) {
    const Edge& ed = g.edge(e);
    if (ed.power_cap) {
      const int si = g.source_index(ed.tail);
      const int off = model.block_offset(si);
      const int nu = model.block_dims[static_cast<size_t>(si)];
      const Matrix sx = model.sigma_x.block(off, off, nu, nu);
      PowerConstraint pc;
      pc.edge = e;
      pc.cap = *ed.power_cap;
      pc.Gamma = Matrix::Zero(d * mask.cols, d * mask.cols);
      for (int r = row; r < row + ed.bandwidth; ++r)
        for (int c1 = 0; c1 < nu; ++c1)
          for (int c2 = 0; c2 < nu; ++c2) pc.Gamma((off + c1) * d + r, (off + c2) * d + r) = sx(c1, c2);
      out.push_back(std::move(pc));
    }
    row += ed.bandwidth;
  }
  return out;
}

NoisySolveState run_noisy(const LtnGraph& g, const SourceModel& model, const Matrix& W, const NoisyOptions& opt,
                          int restart) {
  check_compatible(g, model);
  FactoredTransform ft = single_layer_structure(g, model);
  const std::vector<PowerConstraint> power = power_matrices(g, model);
  const std::vector<int> dims = receiver_input_dims(g);
  const Matrix noise = receiver_noise(g);
  const EqualityConstraints eq = masks_to_equalities(ft, 0);
  const Matrix sigma_rx = model.sigma_rx();
  const Matrix sigma_r = model.sigma_r();

  EdgeTransforms init;
  if (restart == 0 && opt.initial) {
    init = *opt.initial;
    check_transforms(g, model.block_dims, init);
  } else {
    std::mt19937_64 rng = restart_rng(opt.seed, restart);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<int> cols = edge_input_dims(g, model.block_dims);
    for (int e = 0; e < g.num_edges(); ++e) {
      Matrix l(g.edge(e).bandwidth, cols[static_cast<size_t>(e)]);
      for (Eigen::Index c = 0; c < l.cols(); ++c)
        for (Eigen::Index r = 0; r < l.rows(); ++r) l(r, c) = normal(rng);
      const Edge& ed = g.edge(e);
      if (ed.power_cap) {
        const int si = g.source_index(ed.tail);
        const int off = model.block_offset(si);
        const Matrix sx = model.sigma_x.block(off, off, l.cols(), l.cols());
        const double used = (l * sx * l.transpose()).trace();
        // Land 10% inside the cap.
        l *= used > 0.0 ? std::sqrt(0.9 * *ed.power_cap / used) : 0.0;
      }
      init.push_back(std::move(l));
    }
  }
  ft.assign(init);

  auto decoders_for = [&](const Matrix& T) {
    std::vector<Matrix> out;
    int row = 0;
    for (size_t i = 0; i < model.targets.size(); ++i) {
      out.push_back(llse_decoder_noisy(T.middleRows(row, dims[i]), model.sigma_x, model.targets[i].sigma_rx,
                                       noise.block(row, row, dims[i], dims[i])));
      row += dims[i];
    }
    return out;
  };

  NoisySolveState st;
  st.restart = restart;
  Matrix T = ft.layers[0];
  st.decoders = decoders_for(T);
  double d = weighted_mse(model, W, T, stack_decoders(st.decoders), noise);
  st.trace.push_back(d);

  QcqpProblem qp;
  qp.eq_phi = eq.Phi;
  qp.eq_rhs = eq.phi;
  for (const PowerConstraint& pc : power) qp.quad_ineqs.push_back({pc.Gamma, pc.cap});

  for (int it = 1; it <= opt.max_iter; ++it) {
    st.decoders = decoders_for(T);
    const Matrix B = stack_decoders(st.decoders);
    const double current = weighted_mse(model, W, T, B, noise);
    const Matrix wb = W * B;
    const Matrix btwtw = wb.transpose() * W;
    qp.P = kron(model.sigma_x, wb.transpose() * wb);
    qp.p = -2.0 * vec(btwtw * sigma_rx);
    qp.p0 = (W * sigma_r * W.transpose()).trace() + (wb * noise * wb.transpose()).trace();
    qp.warm_start = vec(T);
    const QcqpResult res = solve_qcqp_detailed(qp, opt.qcqp_tol);
    const Matrix candidate = unvec(res.t, T.rows(), T.cols());
    const double value = weighted_mse(model, W, candidate, B, noise);
    double next = current;
    // The barrier solution is optimal to within the solver tolerance; never
    // trade the incumbent for a worse point.
    if (value < current) {
      T = candidate;
      next = value;
    }
    st.iterations = it;
    st.trace.push_back(next);
    const double decrease = d - next;
    d = next;
    if (decrease <= opt.eps) break;
  }
  st.decoders = decoders_for(T);
  st.distortion = std::min(weighted_mse(model, W, T, stack_decoders(st.decoders), noise), st.trace.back());
  st.receiver_distortion = receiver_mse(model, dims, T, st.decoders, noise);
  ft.layers[0] = T;
  st.transforms = ft.extract(g, model.block_dims);
  st.T = T;
  return st;
}

NoisySolveState optimize_noisy(const LtnGraph& g, const SourceModel& model, const Matrix& W, const NoisyOptions& opt) {
  if (opt.restarts < 1) throw Error(ErrorCode::InvalidArgument, "at least one restart required");
  std::vector<NoisySolveState> runs(static_cast<size_t>(opt.restarts));
  parallel_for(opt.restarts, opt.threads, [&](int r) { runs[static_cast<size_t>(r)] = run_noisy(g, model, W, opt, r); });
  size_t best = 0;
  for (size_t r = 1; r < runs.size(); ++r)
    if (runs[r].distortion < runs[best].distortion) best = r;
  std::vector<std::vector<double>> traces;
  for (auto& run : runs) traces.push_back(run.trace);
  NoisySolveState out = std::move(runs[best]);
  out.restart_traces = std::move(traces);
  return out;
}

}  // namespace ltn
