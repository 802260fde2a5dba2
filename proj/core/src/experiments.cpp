/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>

#include "ltn/csv.hpp"
#include "ltn/error.hpp"
#include "ltn/opt_noisy.hpp"
#include "ltn/transfer.hpp"

namespace ltn {

const char* to_string(NetworkMode mode) {
  switch (mode) {
    case NetworkMode::Distributed: return "Distributed";
    case NetworkMode::Hybrid: return "Hybrid";
    case NetworkMode::PointToPoint: return "PointToPoint";
  }
  return "Unknown";
}

NetworkMode classify_mode(int c, int c34) {
  if (c < 1 || c34 < 1) throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive");
  if (c <= c34 / 2) return NetworkMode::Distributed;
  if (c >= c34) return NetworkMode::PointToPoint;
  return NetworkMode::Hybrid;
}

const char* to_string(Assignment a) { return a == Assignment::Direct ? "direct" : "crossed"; }

Scenario hybrid_network(int c, int c34, const Matrix& sigma_x, int n1, int n2) {
  if (sigma_x.rows() != n1 + n2) throw Error(ErrorCode::DimensionMismatch, "hybrid covariance size");
  std::vector<Edge> edges{{0, 2, c, {}, {}}, {1, 2, c, {}, {}}, {2, 3, c34, {}, {}}};
  Scenario s{LtnGraph({"v1", "v2", "v3", "v4"}, edges, {0, 1}, {3}), {}};
  s.model.block_dims = {n1, n2};
  s.model.sigma_x = sigma_x;
  s.model.targets.push_back(linear_target(3, sigma_x, Matrix::Identity(n1 + n2, n1 + n2)));
  return s;
}

Scenario distributed_noisy_network(double alpha, double snr_db, double rho, int block_dim, int sources) {
  if (!(alpha > 0.0) || block_dim < 1 || sources < 1) throw Error(ErrorCode::InvalidArgument, "noisy network shape");
  const int c = std::max(1, static_cast<int>(std::lround(alpha * block_dim)));
  const double power = c * std::pow(10.0, snr_db / 10.0);
  std::vector<std::string> names;
  std::vector<Edge> edges;
  std::vector<NodeId> src;
  for (int i = 0; i < sources; ++i) {
    names.push_back("v" + std::to_string(i + 1));
    src.push_back(i);
    edges.push_back(Edge{i, sources, c, power, Matrix(Matrix::Identity(c, c))});
  }
  names.push_back("v" + std::to_string(sources + 1));
  Scenario s{LtnGraph(names, edges, src, {sources}), {}};
  const int n = sources * block_dim;
  s.model.block_dims.assign(static_cast<size_t>(sources), block_dim);
  s.model.sigma_x = gauss_markov(n, rho);
  s.model.targets.push_back(linear_target(sources, s.model.sigma_x, Matrix::Identity(n, n)));
  return s;
}

Matrix butterfly_covariance() {
  Matrix m(8, 8);
  m << 2.4, 1.1, 0.4, 0.0, 0.1, 0.1, 0.0, 0.1,
       1.1, 1.7, 0.8, 0.4, 0.0, 0.2, 0.2, 0.1,
       0.4, 0.8, 1.2, 0.0, 0.2, 0.6, 0.1, 0.3,
       0.0, 0.4, 0.0, 0.8, 0.3, 0.0, 0.1, 0.0,
       0.1, 0.0, 0.2, 0.3, 1.1, 0.1, 0.2, 0.0,
       0.1, 0.2, 0.6, 0.0, 0.1, 1.2, 0.2, 0.1,
       0.0, 0.2, 0.1, 0.1, 0.2, 0.2, 1.0, 0.6,
       0.1, 0.1, 0.3, 0.0, 0.0, 0.1, 0.6, 1.2;
  return m;
}

Scenario butterfly_network(const Matrix& sigma_x, Assignment assignment, double w5, double w6) {
  if (sigma_x.rows() != 8 || sigma_x.cols() != 8) throw Error(ErrorCode::DimensionMismatch, "butterfly covariance must be 8x8");
  std::vector<Edge> edges{{0, 4, 1, {}, {}}, {0, 2, 2, {}, {}}, {1, 2, 2, {}, {}}, {1, 5, 1, {}, {}},
                          {2, 3, 2, {}, {}}, {3, 4, 2, {}, {}}, {3, 5, 2, {}, {}}};
  Scenario s{LtnGraph({"v1", "v2", "v3", "v4", "v5", "v6"}, edges, {0, 1}, {4, 5}), {}};
  s.model.block_dims = {4, 4};
  s.model.sigma_x = sigma_x;
  const int a5 = assignment == Assignment::Direct ? 0 : 1;
  s.model.targets.push_back(linear_target(4, sigma_x, block_selector(s.model.block_dims, a5), w5));
  s.model.targets.push_back(linear_target(5, sigma_x, block_selector(s.model.block_dims, 1 - a5), w6));
  return s;
}

namespace {

double evaluate(const LtnGraph& g, const SourceModel& model, const Matrix& W, const EdgeTransforms& transforms,
                std::vector<double>* per_receiver = nullptr) {
  const TransferFunction tf = transfer_function(build_state_space(g, model.block_dims, transforms));
  const Matrix T = tf.stacked();
  const std::vector<int> dims = receiver_input_dims(g);
  std::vector<Matrix> decoders;
  int row = 0;
  for (size_t i = 0; i < model.targets.size(); ++i) {
    decoders.push_back(llse_decoder(T.middleRows(row, dims[i]), model.sigma_x, model.targets[i].sigma_rx));
    row += dims[i];
  }
  if (per_receiver) *per_receiver = receiver_mse(model, dims, T, decoders);
  return weighted_mse(model, W, T, stack_decoders(decoders));
}

}  // namespace

double baseline_random_projections(const LtnGraph& g, const SourceModel& model, const Matrix& W, int trials,
                                   std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  check_compatible(g, model);
  const std::vector<int> cols = edge_input_dims(g, model.block_dims);
  double total = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng = restart_rng(seed, trial);
    std::normal_distribution<double> normal(0.0, 1.0);
    EdgeTransforms l;
    for (int e = 0; e < g.num_edges(); ++e) {
      Matrix m(g.edge(e).bandwidth, cols[static_cast<size_t>(e)]);
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = normal(rng);
      l.push_back(std::move(m));
    }
    total += evaluate(g, model, W, l);
  }
  return total / trials;
}

BaselineResult baseline_routing_nc(const LtnGraph& g, const SourceModel& model, Assignment assignment) {
  check_compatible(g, model);
  auto unsupported = [](const std::string& why) { return Error(ErrorCode::UnsupportedTopology, why); };
  if (g.sources().size() != 2 || g.receivers().size() != 2 || g.relays().size() != 2 || g.num_edges() != 7)
    throw unsupported("routing baseline needs two sources, two relays, two receivers and seven edges");
  const NodeId s1 = g.sources()[0], s2 = g.sources()[1];
  NodeId mixer = -1, fanout = -1;
  for (NodeId v : g.relays()) {
    const auto& in = g.in_edges(v);
    if (in.size() == 2 && g.is_source(g.edge(in[0]).tail) && g.is_source(g.edge(in[1]).tail)) mixer = v;
    else fanout = v;
  }
  if (mixer < 0 || fanout < 0) throw unsupported("no relay merges both sources");
  auto find_edge = [&](NodeId t, NodeId h) {
    for (int e : g.out_edges(t))
      if (g.edge(e).head == h) return e;
    return -1;
  };
  auto direct_from = [&](NodeId s) {
    for (int e : g.out_edges(s))
      if (g.is_receiver(g.edge(e).head)) return e;
    return -1;
  };
  const int d1 = direct_from(s1), d2 = direct_from(s2);
  const int m1 = find_edge(s1, mixer), m2 = find_edge(s2, mixer), mf = find_edge(mixer, fanout);
  if (d1 < 0 || d2 < 0 || m1 < 0 || m2 < 0 || mf < 0 || g.edge(d1).head == g.edge(d2).head)
    throw unsupported("edges do not form the two-source butterfly");
  const int f1 = find_edge(fanout, g.edge(d1).head), f2 = find_edge(fanout, g.edge(d2).head);
  if (f1 < 0 || f2 < 0) throw unsupported("shared relay must reach both receivers");
  if (g.edge(d1).bandwidth != 1 || g.edge(d2).bandwidth != 1 || g.edge(m1).bandwidth != 2 ||
      g.edge(m2).bandwidth != 2 || g.edge(mf).bandwidth != 2 || g.edge(f1).bandwidth != 2 || g.edge(f2).bandwidth != 2)
    throw unsupported("butterfly bandwidths must be 1 on direct edges and 2 elsewhere");
  if (model.block_dims[0] < 2 || model.block_dims[1] < 2) throw unsupported("sources need at least two dimensions");

  const int n1 = model.block_dims[0], n2 = model.block_dims[1];
  const SymEig a = sym_eig(model.sigma_x.topLeftCorner(n1, n1));
  const SymEig b = sym_eig(model.sigma_x.block(n1, n1, n2, n2));
  const Vector e1 = a.eigenvectors.col(0), e2 = a.eigenvectors.col(1);
  const Vector g1 = b.eigenvectors.col(0), g2 = b.eigenvectors.col(1);

  EdgeTransforms l(7);
  l[static_cast<size_t>(f1)] = Matrix::Identity(2, 2);
  l[static_cast<size_t>(f2)] = Matrix::Identity(2, 2);
  Matrix to_mix1 = Matrix::Zero(2, n1), to_mix2 = Matrix::Zero(2, n2);
  // Columns of the mixer input: its in-edges in edge order, two rows each.
  const int off1 = m1 < m2 ? 0 : 2, off2 = m1 < m2 ? 2 : 0;
  Matrix mix = Matrix::Zero(2, 4);
  if (assignment == Assignment::Direct) {
    // Second components go direct; the relay forwards both first components.
    l[static_cast<size_t>(d1)] = e2.transpose();
    l[static_cast<size_t>(d2)] = g2.transpose();
    to_mix1.row(0) = e1.transpose();
    to_mix2.row(0) = g1.transpose();
    mix(0, off1) = 1.0;
    mix(1, off2) = 1.0;
  } else {
    // First components go direct; the relay sends their sum and e2' x1.
    l[static_cast<size_t>(d1)] = e1.transpose();
    l[static_cast<size_t>(d2)] = g1.transpose();
    to_mix1.row(0) = e1.transpose();
    to_mix1.row(1) = e2.transpose();
    to_mix2.row(0) = g1.transpose();
    mix(0, off1) = 1.0;
    mix(0, off2) = 1.0;
    mix(1, off1 + 1) = 1.0;
  }
  l[static_cast<size_t>(m1)] = to_mix1;
  l[static_cast<size_t>(m2)] = to_mix2;
  l[static_cast<size_t>(mf)] = mix;

  BaselineResult out;
  out.sum = evaluate(g, model, build_weight_matrix(model), l, &out.per_receiver);
  out.transforms = std::move(l);
  return out;
}

HybridResult run_hybrid(const HybridConfig& cfg) {
  const Matrix sigma = hybrid_random_cov(cfg.n1 + cfg.n2, cfg.covariance_seed);
  std::vector<int> cs = cfg.c_values;
  if (cs.empty())
    for (int c = 1; c <= cfg.c34 + 4; ++c) cs.push_back(c);
  HybridResult res;
  res.rows.resize(cs.size());
  for (size_t i = 0; i < cs.size(); ++i) {
    const Scenario s = hybrid_network(cs[i], cfg.c34, sigma, cfg.n1, cfg.n2);
    const Matrix W = build_weight_matrix(s.model);
    const IdealSolveState st = optimize_ideal(s.graph, s.model, W, cfg.solver);
    res.rows[i] = {cs[i], classify_mode(cs[i], cfg.c34), st.distortion, cutset_scan(s.graph, s.model, W, false).bound};
    if (cs[i] == cfg.trace_c) res.traces = st.restart_traces;
  }
  if (res.traces.empty() && cfg.trace_c >= 1) {
    const Scenario s = hybrid_network(cfg.trace_c, cfg.c34, sigma, cfg.n1, cfg.n2);
    res.traces = optimize_ideal(s.graph, s.model, build_weight_matrix(s.model), cfg.solver).restart_traces;
  }
  return res;
}

NoisyGridRow noisy_grid_bounds(const Scenario& s, double alpha, double snr_db) {
  const Matrix W = build_weight_matrix(s.model);
  const Cut all_sources = make_cut(s.graph, s.graph.sources());
  const CutProblem cp = cut_problem(s.graph, s.model, W, all_sources, true);
  NoisyGridRow row;
  row.alpha = alpha;
  row.snr_db = snr_db;
  row.bound_ideal = ideal_bound(cp.innov, cp.W, cp.bandwidth);
  row.bound_sdp = sdp_bound(cp.innov, cp.W, cp.sigma_x, cp.power / cp.noise_floor);
  row.bound_info = info_bound(s.graph, s.model, W, all_sources);
  return row;
}

std::vector<NoisyGridRow> run_distributed_noisy(const NoisyGridConfig& cfg) {
  std::vector<double> snrs = cfg.snr_db;
  if (snrs.empty())
    for (int db = -10; db <= 30; db += 2) snrs.push_back(db);
  std::vector<NoisyGridRow> rows(cfg.alphas.size() * snrs.size());
  parallel_for(static_cast<int>(rows.size()), cfg.threads, [&](int k) {
    const double alpha = cfg.alphas[static_cast<size_t>(k) / snrs.size()];
    const double snr = snrs[static_cast<size_t>(k) % snrs.size()];
    const Scenario s = distributed_noisy_network(alpha, snr, cfg.rho, cfg.block_dim, cfg.sources);
    NoisyOptions opt;
    opt.restarts = cfg.restarts;
    opt.seed = cfg.seed;
    opt.eps = cfg.eps;
    opt.max_iter = cfg.max_iter;
    opt.threads = 1;
    NoisyGridRow row = noisy_grid_bounds(s, alpha, snr);
    row.distortion = optimize_noisy(s.graph, s.model, build_weight_matrix(s.model), opt).distortion;
    rows[static_cast<size_t>(k)] = row;
  });
  return rows;
}

UnicastResult run_multiple_unicast(const UnicastConfig& cfg) {
  const Matrix sigma = cfg.sigma_x.size() ? cfg.sigma_x : butterfly_covariance();
  UnicastResult res;
  for (Assignment a : {Assignment::Direct, Assignment::Crossed}) {
    const Scenario s = butterfly_network(sigma, a);
    const Matrix W = build_weight_matrix(s.model);
    res.table.push_back({a, "random_projection", baseline_random_projections(s.graph, s.model, W, cfg.trials, cfg.solver.seed)});
    res.table.push_back({a, "routing_nc", baseline_routing_nc(s.graph, s.model, a).sum});
    res.table.push_back({a, "iterative", optimize_ideal(s.graph, s.model, W, cfg.solver).distortion});
    res.table.push_back({a, "lower_bound", cutset_scan(s.graph, s.model, W, false).bound});

    std::vector<RegionPoint> pts;
    for (double ratio : weight_ratio_sweep(cfg.weights, cfg.ratio_min, cfg.ratio_max)) {
      RegionPoint p;
      p.assignment = a;
      p.ratio = ratio;
      p.w5 = ratio / (1.0 + ratio);
      p.w6 = 1.0 / (1.0 + ratio);
      const Scenario ws = butterfly_network(sigma, a, p.w5, p.w6);
      const Matrix ww = build_weight_matrix(ws.model);
      const IdealSolveState st = optimize_ideal(ws.graph, ws.model, ww, cfg.solver);
      p.d5 = st.receiver_distortion[0];
      p.d6 = st.receiver_distortion[1];
      p.bound = cutset_scan(ws.graph, ws.model, ww, false).bound;
      pts.push_back(p);
    }
    // A point is a vertex of the achievable region's lower-left hull when it
    // minimizes its own weighted objective over all points.
    for (RegionPoint& p : pts) {
      const double own = p.w5 * p.d5 + p.w6 * p.d6;
      bool best = true;
      for (const RegionPoint& q : pts)
        if (p.w5 * q.d5 + p.w6 * q.d6 < own - 1e-9) best = false;
      p.on_hull = best;
    }
    res.region.insert(res.region.end(), pts.begin(), pts.end());
  }
  return res;
}

void write_trace_csv(const std::string& path, const std::vector<std::vector<double>>& traces) {
  CsvWriter w(path, {"restart", "iter", "D"});
  for (size_t r = 0; r < traces.size(); ++r)
    for (size_t i = 0; i < traces[r].size(); ++i) w.row({std::to_string(r), std::to_string(i), format_number(traces[r][i])});
}

void write_bounds_csv(const std::string& path, const LtnGraph& g, const CutsetScan& scan) {
  CsvWriter w(path, {"cut_id", "members", "C", "P", "d_ideal", "d_sdp", "d_info"});
  for (const BoundReport& r : scan.reports) {
    std::string members;
    for (NodeId v : r.cut.f_side) members += (members.empty() ? "" : " ") + g.name(v);
    w.row({std::to_string(r.cut_id), members, std::to_string(r.C_F), format_number(r.P_F), format_number(r.d_ideal),
           r.d_sdp ? format_number(*r.d_sdp) : "", r.d_info ? format_number(*r.d_info) : ""});
  }
}

void write_hybrid_csv(const std::string& dir, const HybridResult& res) {
  const std::filesystem::path d(dir);
  CsvWriter w((d / "hybrid.csv").string(), {"c", "mode", "distortion", "bound_ideal"});
  for (const HybridRow& r : res.rows)
    w.row({std::to_string(r.c), to_string(r.mode), format_number(r.distortion), format_number(r.bound_ideal)});
  write_trace_csv((d / "hybrid_trace.csv").string(), res.traces);
}

void write_noisy_grid_csv(const std::string& path, const std::vector<NoisyGridRow>& rows) {
  CsvWriter w(path, {"alpha", "snr_db", "distortion", "bound_ideal", "bound_sdp", "bound_info"});
  for (const NoisyGridRow& r : rows)
    w.row({format_number(r.alpha), format_number(r.snr_db), format_number(r.distortion), format_number(r.bound_ideal),
           format_number(r.bound_sdp), format_number(r.bound_info)});
}

void write_unicast_csv(const std::string& dir, const UnicastResult& res) {
  const std::filesystem::path d(dir);
  CsvWriter t((d / "unicast_table.csv").string(), {"assignment", "method", "sum_distortion"});
  for (const TableRow& r : res.table) t.row({to_string(r.assignment), r.method, format_number(r.value)});
  CsvWriter g((d / "region.csv").string(), {"assignment", "ratio", "w5", "w6", "d5", "d6", "bound", "on_hull"});
  for (const RegionPoint& p : res.region)
    g.row({to_string(p.assignment), format_number(p.ratio), format_number(p.w5), format_number(p.w6), format_number(p.d5),
           format_number(p.d6), format_number(p.bound), p.on_hull ? "1" : "0"});
}

}  // namespace ltn
