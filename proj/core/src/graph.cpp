/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/graph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

#include "ltn/error.hpp"

namespace ltn {

LtnGraph::LtnGraph(std::vector<std::string> names, std::vector<Edge> edges,
                   const std::vector<NodeId>& sources, const std::vector<NodeId>& receivers) {
  const int n = static_cast<int>(names.size());
  auto check = [n](NodeId v, const char* what) {
    if (v < 0 || v >= n) throw Error(ErrorCode::UnknownNode, std::string(what) + " refers to node " + std::to_string(v));
  };
  std::vector<unsigned char> input_roles(static_cast<size_t>(n), 0);
  for (NodeId s : sources) {
    check(s, "source list");
    input_roles[static_cast<size_t>(s)] |= kSource;
  }
  for (NodeId r : receivers) {
    check(r, "receiver list");
    input_roles[static_cast<size_t>(r)] |= kReceiver;
  }
  for (const Edge& e : edges) {
    check(e.tail, "edge tail");
    check(e.head, "edge head");
  }

  // Sources first, then relays, then pure receivers.
  std::vector<NodeId> order;
  order.reserve(static_cast<size_t>(n));
  for (int pass = 0; pass < 3; ++pass)
    for (NodeId v = 0; v < n; ++v) {
      const unsigned char r = input_roles[static_cast<size_t>(v)];
      const int group = (r & kSource) ? 0 : (r & kReceiver) ? 2 : 1;
      if (group == pass) order.push_back(v);
    }

  relabel_.assign(static_cast<size_t>(n), 0);
  names_.resize(static_cast<size_t>(n));
  roles_.resize(static_cast<size_t>(n));
  for (NodeId c = 0; c < n; ++c) {
    const NodeId old = order[static_cast<size_t>(c)];
    relabel_[static_cast<size_t>(old)] = c;
    names_[static_cast<size_t>(c)] = std::move(names[static_cast<size_t>(old)]);
    roles_[static_cast<size_t>(c)] = input_roles[static_cast<size_t>(old)];
  }
  for (NodeId c = 0; c < n; ++c) {
    if (roles_[static_cast<size_t>(c)] & kSource) sources_.push_back(c);
    if (roles_[static_cast<size_t>(c)] & kReceiver) receivers_.push_back(c);
  }

  edges_ = std::move(edges);
  in_.assign(static_cast<size_t>(n), {});
  out_.assign(static_cast<size_t>(n), {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    Edge& ed = edges_[static_cast<size_t>(e)];
    ed.tail = relabel_[static_cast<size_t>(ed.tail)];
    ed.head = relabel_[static_cast<size_t>(ed.head)];
    out_[static_cast<size_t>(ed.tail)].push_back(e);
    in_[static_cast<size_t>(ed.head)].push_back(e);
  }
}

LtnGraph LtnGraph::from_edges(int num_nodes, std::vector<Edge> edges) {
  std::vector<int> indeg(static_cast<size_t>(num_nodes), 0), outdeg(static_cast<size_t>(num_nodes), 0);
  for (const Edge& e : edges) {
    if (e.tail < 0 || e.tail >= num_nodes || e.head < 0 || e.head >= num_nodes)
      throw Error(ErrorCode::UnknownNode, "edge endpoint out of range");
    ++outdeg[static_cast<size_t>(e.tail)];
    ++indeg[static_cast<size_t>(e.head)];
  }
  std::vector<std::string> names;
  std::vector<NodeId> sources, receivers;
  for (NodeId v = 0; v < num_nodes; ++v) {
    names.push_back("v" + std::to_string(v + 1));
    if (indeg[static_cast<size_t>(v)] == 0 && outdeg[static_cast<size_t>(v)] > 0) sources.push_back(v);
    if (outdeg[static_cast<size_t>(v)] == 0 && indeg[static_cast<size_t>(v)] > 0) receivers.push_back(v);
  }
  return LtnGraph(std::move(names), std::move(edges), sources, receivers);
}

std::optional<NodeId> LtnGraph::find(const std::string& name) const {
  for (NodeId v = 0; v < num_nodes(); ++v)
    if (names_[static_cast<size_t>(v)] == name) return v;
  return std::nullopt;
}

std::vector<NodeId> LtnGraph::relays() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < num_nodes(); ++v)
    if (is_relay(v)) out.push_back(v);
  return out;
}

int LtnGraph::source_index(NodeId v) const {
  auto it = std::find(sources_.begin(), sources_.end(), v);
  return it == sources_.end() ? -1 : static_cast<int>(it - sources_.begin());
}

int LtnGraph::receiver_index(NodeId v) const {
  auto it = std::find(receivers_.begin(), receivers_.end(), v);
  return it == receivers_.end() ? -1 : static_cast<int>(it - receivers_.begin());
}

int LtnGraph::total_bandwidth() const {
  int c = 0;
  for (const Edge& e : edges_) c += e.bandwidth;
  return c;
}

std::vector<NodeId> topological_order(const LtnGraph& g) {
  const int n = g.num_nodes();
  std::vector<int> indeg(static_cast<size_t>(n), 0);
  for (const Edge& e : g.edges()) ++indeg[static_cast<size_t>(e.head)];
  // Min-heap keeps the order deterministic and label-sorted among ready nodes.
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[static_cast<size_t>(v)] == 0) ready.push(v);
  std::vector<NodeId> order;
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int e : g.out_edges(v))
      if (--indeg[static_cast<size_t>(g.edge(e).head)] == 0) ready.push(g.edge(e).head);
  }
  if (static_cast<int>(order.size()) != n)
    throw Error(ErrorCode::CycleDetected, "graph contains a directed cycle");
  return order;
}

ValidationReport validate(const LtnGraph& g) {
  ValidationReport report;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.bandwidth < 1)
      throw Error(ErrorCode::ZeroBandwidth, "edge " + g.name(ed.tail) + "->" + g.name(ed.head));
    if (ed.power_cap && !(*ed.power_cap >= 0.0))
      throw Error(ErrorCode::InvalidArgument, "negative power cap on edge " + std::to_string(e));
    if (ed.noise_cov) {
      const Matrix& z = *ed.noise_cov;
      if (z.rows() != ed.bandwidth || z.cols() != ed.bandwidth)
        throw Error(ErrorCode::DimensionMismatch, "noise covariance size differs from bandwidth on edge " + std::to_string(e));
      if ((z - z.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff()) || !is_psd(z))
        throw Error(ErrorCode::InvalidArgument, "noise covariance is not symmetric PSD on edge " + std::to_string(e));
    }
  }
  for (NodeId s : g.sources())
    if (!g.in_edges(s).empty()) throw Error(ErrorCode::SourceHasInEdge, g.name(s));
  for (NodeId r : g.receivers())
    if (!g.out_edges(r).empty()) throw Error(ErrorCode::ReceiverHasOutEdge, g.name(r));
  topological_order(g);
  if (g.receivers().empty()) report.warnings.emplace_back("NoReceivers");
  if (g.sources().empty()) report.warnings.emplace_back("NoSources");
  return report;
}

std::pair<int, int> degrees(const LtnGraph& g, NodeId node) {
  if (node < 0 || node >= g.num_nodes()) throw Error(ErrorCode::UnknownNode, std::to_string(node));
  int din = 0, dout = 0;
  for (int e : g.in_edges(node)) din += g.edge(e).bandwidth;
  for (int e : g.out_edges(node)) dout += g.edge(e).bandwidth;
  return {din, dout};
}

Layering layer_partition(const LtnGraph& g) {
  const std::vector<NodeId> order = topological_order(g);
  Layering lay;
  lay.level.assign(static_cast<size_t>(g.num_nodes()), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int lvl = 0;
    for (int e : g.out_edges(*it)) lvl = std::max(lvl, lay.level[static_cast<size_t>(g.edge(e).head)] + 1);
    lay.level[static_cast<size_t>(*it)] = lvl;
  }
  int top = 0;
  for (int l : lay.level) top = std::max(top, l);
  for (NodeId s : g.sources()) lay.level[static_cast<size_t>(s)] = top;
  if (g.num_nodes() == 0) return lay;
  lay.partitions.assign(static_cast<size_t>(top) + 1, {});
  for (NodeId v = 0; v < g.num_nodes(); ++v) lay.partitions[static_cast<size_t>(lay.level[static_cast<size_t>(v)])].push_back(v);
  return lay;
}

bool Cut::contains(NodeId v) const { return std::binary_search(f_side.begin(), f_side.end(), v); }

Cut make_cut(const LtnGraph& g, std::vector<NodeId> f_side) {
  for (NodeId v : f_side)
    if (v < 0 || v >= g.num_nodes()) throw Error(ErrorCode::UnknownNode, std::to_string(v));
  std::sort(f_side.begin(), f_side.end());
  f_side.erase(std::unique(f_side.begin(), f_side.end()), f_side.end());
  Cut cut;
  cut.f_side = std::move(f_side);
  for (NodeId s : g.sources())
    if (cut.contains(s)) cut.sources_in_f.push_back(s);
  for (NodeId r : g.receivers())
    if (!cut.contains(r)) cut.receivers_out.push_back(r);
  return cut;
}

namespace {

// Edmonds-Karp on a dense capacity matrix; returns the residual-reachable set.
std::vector<char> min_cut_source_side(std::vector<std::vector<long long>> cap, int s, int t) {
  const int n = static_cast<int>(cap.size());
  for (;;) {
    std::vector<int> parent(static_cast<size_t>(n), -1);
    parent[static_cast<size_t>(s)] = s;
    std::queue<int> q;
    q.push(s);
    while (!q.empty() && parent[static_cast<size_t>(t)] < 0) {
      const int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v)
        if (parent[static_cast<size_t>(v)] < 0 && cap[static_cast<size_t>(u)][static_cast<size_t>(v)] > 0) {
          parent[static_cast<size_t>(v)] = u;
          q.push(v);
        }
    }
    if (parent[static_cast<size_t>(t)] < 0) {
      std::vector<char> side(static_cast<size_t>(n), 0);
      for (int v = 0; v < n; ++v) side[static_cast<size_t>(v)] = parent[static_cast<size_t>(v)] >= 0;
      return side;
    }
    long long flow = std::numeric_limits<long long>::max();
    for (int v = t; v != s; v = parent[static_cast<size_t>(v)])
      flow = std::min(flow, cap[static_cast<size_t>(parent[static_cast<size_t>(v)])][static_cast<size_t>(v)]);
    for (int v = t; v != s; v = parent[static_cast<size_t>(v)]) {
      const int u = parent[static_cast<size_t>(v)];
      cap[static_cast<size_t>(u)][static_cast<size_t>(v)] -= flow;
      cap[static_cast<size_t>(v)][static_cast<size_t>(u)] += flow;
    }
  }
}

}  // namespace

std::vector<Cut> enumerate_cuts(const LtnGraph& g) {
  for (NodeId s : g.sources())
    if (g.is_receiver(s)) throw Error(ErrorCode::SourceReceiverOverlap, g.name(s));
  const int ns = static_cast<int>(g.sources().size());
  const int nt = static_cast<int>(g.receivers().size());
  if (ns > 20 || nt > 20) throw Error(ErrorCode::InvalidArgument, "too many terminals to enumerate cuts");

  const int n = g.num_nodes();
  const int src = n, snk = n + 1;
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<std::vector<long long>> base(static_cast<size_t>(n) + 2, std::vector<long long>(static_cast<size_t>(n) + 2, 0));
  for (const Edge& e : g.edges()) base[static_cast<size_t>(e.tail)][static_cast<size_t>(e.head)] += e.bandwidth;

  std::vector<Cut> cuts;
  for (int amask = 1; amask < (1 << ns); ++amask)
    for (int bmask = 1; bmask < (1 << nt); ++bmask) {
      auto cap = base;
      for (int i = 0; i < ns; ++i) {
        const auto s = static_cast<size_t>(g.sources()[static_cast<size_t>(i)]);
        if (amask >> i & 1) cap[static_cast<size_t>(src)][s] = inf;
        else cap[s][static_cast<size_t>(snk)] = inf;
      }
      for (int j = 0; j < nt; ++j) {
        const auto r = static_cast<size_t>(g.receivers()[static_cast<size_t>(j)]);
        if (bmask >> j & 1) cap[r][static_cast<size_t>(snk)] = inf;
        else cap[static_cast<size_t>(src)][r] = inf;
      }
      const std::vector<char> side = min_cut_source_side(std::move(cap), src, snk);
      std::vector<NodeId> f;
      for (NodeId v = 0; v < n; ++v)
        if (side[static_cast<size_t>(v)]) f.push_back(v);
      cuts.push_back(make_cut(g, std::move(f)));
    }
  return cuts;
}

CutCapacity cut_capacity(const LtnGraph& g, const Cut& cut, bool require_power) {
  CutCapacity out;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (!cut.contains(ed.tail) || cut.contains(ed.head)) continue;
    out.bandwidth += ed.bandwidth;
    if (ed.power_cap) out.power += *ed.power_cap;
    else if (require_power)
      throw Error(ErrorCode::MissingPowerCap, "edge " + g.name(ed.tail) + "->" + g.name(ed.head));
  }
  return out;
}

}  // namespace ltn
