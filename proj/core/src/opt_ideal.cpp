/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/opt_ideal.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "ltn/convex.hpp"
#include "ltn/error.hpp"

namespace ltn {

void check_compatible(const LtnGraph& g, const SourceModel& model) {
  if (model.block_dims.size() != g.sources().size())
    throw Error(ErrorCode::DimensionMismatch, "model has " + std::to_string(model.block_dims.size()) +
                                                  " source blocks for " + std::to_string(g.sources().size()) + " sources");
  if (model.targets.size() != g.receivers().size())
    throw Error(ErrorCode::DimensionMismatch, "model needs one target per receiver");
  for (size_t i = 0; i < model.targets.size(); ++i)
    if (model.targets[i].receiver != g.receivers()[i])
      throw Error(ErrorCode::DimensionMismatch, "targets must follow receiver order");
}

Matrix llse_decoder(const Matrix& G, const Matrix& sigma_x, const Matrix& sigma_rx) {
  if (G.cols() != sigma_x.rows() || sigma_rx.cols() != sigma_x.rows())
    throw Error(ErrorCode::DimensionMismatch, "llse_decoder");
  Matrix gram = G * sigma_x * G.transpose();
  gram = 0.5 * (gram + gram.transpose());
  return sigma_rx * G.transpose() * pinv(gram);
}

Matrix stack_decoders(const std::vector<Matrix>& decoders) {
  Eigen::Index r = 0, c = 0;
  for (const Matrix& b : decoders) {
    r += b.rows();
    c += b.cols();
  }
  Matrix out = Matrix::Zero(r, c);
  r = c = 0;
  for (const Matrix& b : decoders) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

std::vector<int> receiver_input_dims(const LtnGraph& g) {
  std::vector<int> out;
  for (NodeId r : g.receivers()) out.push_back(degrees(g, r).first);
  return out;
}

double weighted_mse(const SourceModel& model, const Matrix& W, const Matrix& T, const Matrix& B, const Matrix& noise_y) {
  const Matrix wb = W * B;
  Matrix cov_y = T * model.sigma_x * T.transpose();
  if (noise_y.size()) cov_y += noise_y;
  return (W * model.sigma_r() * W.transpose()).trace() - 2.0 * (wb * T * model.sigma_rx().transpose() * W.transpose()).trace() +
         (wb * cov_y * wb.transpose()).trace();
}

std::vector<double> receiver_mse(const SourceModel& model, const std::vector<int>& input_dims, const Matrix& T,
                                 const std::vector<Matrix>& decoders, const Matrix& noise_y) {
  std::vector<double> out;
  int row = 0;
  for (size_t i = 0; i < model.targets.size(); ++i) {
    const ReceiverTarget& t = model.targets[i];
    const int d = input_dims[i];
    const Matrix G = T.middleRows(row, d);
    Matrix cov = G * model.sigma_x * G.transpose();
    if (noise_y.size()) cov += noise_y.block(row, row, d, d);
    const Matrix& b = decoders[i];
    out.push_back(t.sigma_r.trace() - 2.0 * (b * G * t.sigma_rx.transpose()).trace() + (b * cov * b.transpose()).trace());
    row += d;
  }
  return out;
}

QuadCoeffs quad_coeffs(const FactoredTransform& ft, int layer, const Matrix& B, const Matrix& W, const SourceModel& model) {
  const int p = ft.num_layers();
  if (layer < 0 || layer >= p) throw Error(ErrorCode::InvalidArgument, "layer index out of range");
  const Matrix pre = ft.product(0, layer - 1);
  const Matrix post = ft.product(layer + 1, p - 1);
  if (B.cols() != pre.rows() || W.cols() != B.rows() || post.cols() != model.sigma_x.rows())
    throw Error(ErrorCode::DimensionMismatch, "quad_coeffs");
  const Matrix wtwb = W.transpose() * W * B;
  const Matrix j1 = pre.transpose() * B.transpose() * wtwb * pre;          // J'
  const Matrix j2 = post * model.sigma_x * post.transpose();                // J''
  const Matrix j = post * model.sigma_rx().transpose() * wtwb * pre;        // J_i
  QuadCoeffs qc;
  qc.P = kron(j2, j1);
  qc.p = -2.0 * vec(j.transpose());
  qc.scalar = (W * model.sigma_r() * W.transpose()).trace();
  return qc;
}

std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x6c746eu};
  return std::mt19937_64(seq);
}

namespace {

std::vector<Matrix> decoders_for(const SourceModel& model, const std::vector<int>& dims, const Matrix& T) {
  std::vector<Matrix> out;
  int row = 0;
  for (size_t i = 0; i < model.targets.size(); ++i) {
    out.push_back(llse_decoder(T.middleRows(row, dims[i]), model.sigma_x, model.targets[i].sigma_rx));
    row += dims[i];
  }
  return out;
}

// Exact minimizer over the free entries of one layer; pinned entries stay put.
Matrix layer_update(const FactoredTransform& ft, int layer, const Matrix& B, const Matrix& W, const SourceModel& model) {
  const int p = ft.num_layers();
  const Matrix pre = ft.product(0, layer - 1);
  const Matrix post = ft.product(layer + 1, p - 1);
  const Matrix wtwb = W.transpose() * W * B;
  const Matrix j1 = pre.transpose() * B.transpose() * wtwb * pre;
  const Matrix j2 = post * model.sigma_x * post.transpose();
  const Matrix j = post * model.sigma_rx().transpose() * wtwb * pre;

  const LayerMask& mask = ft.masks[static_cast<size_t>(layer)];
  Matrix pinned = ft.layers[static_cast<size_t>(layer)];
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index c = 0; c < mask.cols; ++c)
    for (Eigen::Index r = 0; r < mask.rows; ++r) {
      if (!mask.at(r, c).free) continue;
      rows.push_back(r);
      cols.push_back(c);
      pinned(r, c) = 0.0;
    }
  // Objective over t: t^T (J'' kron J') t - 2 vec(J^T)^T t, restricted to free coordinates.
  const auto nf = static_cast<Eigen::Index>(rows.size());
  const Matrix jt = j.transpose();
  const Matrix fixed_grad = j1 * pinned * j2;  // (J'' kron J') vec(pinned) = vec(J' T J'')
  Matrix h(nf, nf);
  Vector g(nf);
  for (Eigen::Index a = 0; a < nf; ++a) {
    g(a) = -2.0 * jt(rows[a], cols[a]) + 2.0 * fixed_grad(rows[a], cols[a]);
    for (Eigen::Index b = 0; b < nf; ++b) h(a, b) = j2(cols[a], cols[b]) * j1(rows[a], rows[b]);
  }
  const Vector tf = solve_eq_qp(h, g, Matrix(0, nf), Vector(0));
  Matrix out = pinned;
  for (Eigen::Index a = 0; a < nf; ++a) out(rows[a], cols[a]) = tf(a);
  return out;
}

}  // namespace

IdealSolveState run_ideal(const LtnGraph& g, const SourceModel& model, const Matrix& W, const IdealOptions& opt,
                          int restart) {
  check_compatible(g, model);
  const std::vector<int> dims = receiver_input_dims(g);
  const Layering lay = layer_partition(g);
  FactoredTransform ft = factor_structure(g, lay, model.block_dims);

  EdgeTransforms init;
  if (restart == 0 && opt.initial) {
    init = *opt.initial;
  } else {
    std::mt19937_64 rng = restart_rng(opt.seed, restart);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<int> cols = edge_input_dims(g, model.block_dims);
    for (int e = 0; e < g.num_edges(); ++e) {
      Matrix l(g.edge(e).bandwidth, cols[static_cast<size_t>(e)]);
      for (Eigen::Index c = 0; c < l.cols(); ++c)
        for (Eigen::Index r = 0; r < l.rows(); ++r) l(r, c) = normal(rng);
      init.push_back(std::move(l));
    }
  }
  check_transforms(g, model.block_dims, init);
  ft.assign(init);

  IdealSolveState st;
  st.restart = restart;
  Matrix T = ft.product();
  st.decoders = decoders_for(model, dims, T);
  double d = weighted_mse(model, W, T, stack_decoders(st.decoders));
  st.trace.push_back(d);

  for (int it = 1; it <= opt.max_iter; ++it) {
    st.decoders = decoders_for(model, dims, T);
    const Matrix B = stack_decoders(st.decoders);
    double current = weighted_mse(model, W, T, B);
    for (int layer = 0; layer < ft.num_layers(); ++layer) {
      Matrix previous = ft.layers[static_cast<size_t>(layer)];
      ft.layers[static_cast<size_t>(layer)] = layer_update(ft, layer, B, W, model);
      const Matrix candidate = ft.product();
      const double value = weighted_mse(model, W, candidate, B);
      // Rounding can make an exact minimizer evaluate marginally worse; keep the incumbent then.
      if (value > current) {
        ft.layers[static_cast<size_t>(layer)] = std::move(previous);
      } else {
        current = value;
        T = candidate;
      }
    }
    st.iterations = it;
    st.trace.push_back(current);
    const double decrease = d - current;
    d = current;
    if (decrease <= opt.eps) break;
  }
  st.decoders = decoders_for(model, dims, T);
  st.distortion = weighted_mse(model, W, T, stack_decoders(st.decoders));
  if (st.distortion > st.trace.back()) st.distortion = st.trace.back();
  st.receiver_distortion = receiver_mse(model, dims, T, st.decoders);
  st.transforms = ft.extract(g, model.block_dims);
  st.transform = std::move(ft);
  return st;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

IdealSolveState optimize_ideal(const LtnGraph& g, const SourceModel& model, const Matrix& W, const IdealOptions& opt) {
  if (opt.restarts < 1) throw Error(ErrorCode::InvalidArgument, "at least one restart required");
  std::vector<IdealSolveState> runs(static_cast<size_t>(opt.restarts));
  parallel_for(opt.restarts, opt.threads, [&](int r) { runs[static_cast<size_t>(r)] = run_ideal(g, model, W, opt, r); });
  size_t best = 0;
  for (size_t r = 1; r < runs.size(); ++r)
    if (runs[r].distortion < runs[best].distortion) best = r;
  IdealSolveState out = std::move(runs[best]);
  for (auto& run : runs) out.restart_traces.push_back(run.trace);
  out.restart_traces[best] = out.trace;
  return out;
}

}  // namespace ltn
