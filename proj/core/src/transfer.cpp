/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#include "ltn/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ltn/error.hpp"

namespace ltn {

namespace {

int source_offset(const std::vector<int>& dims, int source_index) {
  return std::accumulate(dims.begin(), dims.begin() + source_index, 0);
}

void check_source_dims(const LtnGraph& g, const std::vector<int>& dims) {
  if (dims.size() != g.sources().size())
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(g.sources().size()) +
                                                  " source dimensions, got " + std::to_string(dims.size()));
}

}  // namespace

std::vector<int> edge_input_dims(const LtnGraph& g, const std::vector<int>& source_dims) {
  check_source_dims(g, source_dims);
  std::vector<int> out;
  for (const Edge& e : g.edges()) {
    const int si = g.source_index(e.tail);
    out.push_back(si >= 0 ? source_dims[static_cast<size_t>(si)] : degrees(g, e.tail).first);
  }
  return out;
}

void check_transforms(const LtnGraph& g, const std::vector<int>& source_dims, const EdgeTransforms& transforms) {
  const std::vector<int> cols = edge_input_dims(g, source_dims);
  if (static_cast<int>(transforms.size()) != g.num_edges())
    throw Error(ErrorCode::DimensionMismatch, "one transform per edge required");
  for (int e = 0; e < g.num_edges(); ++e) {
    const Matrix& l = transforms[static_cast<size_t>(e)];
    if (l.rows() != g.edge(e).bandwidth || l.cols() != cols[static_cast<size_t>(e)])
      throw Error(ErrorCode::DimensionMismatch,
                  "edge " + std::to_string(e) + " transform is " + std::to_string(l.rows()) + "x" +
                      std::to_string(l.cols()) + ", expected " + std::to_string(g.edge(e).bandwidth) + "x" +
                      std::to_string(cols[static_cast<size_t>(e)]));
  }
}

StateSpace build_state_space(const LtnGraph& g, const std::vector<int>& source_dims,
                             const EdgeTransforms& transforms) {
  check_transforms(g, source_dims, transforms);
  StateSpace ss;
  int c = 0;
  for (const Edge& e : g.edges()) {
    ss.edge_offset.push_back(c);
    c += e.bandwidth;
  }
  const int n = std::accumulate(source_dims.begin(), source_dims.end(), 0);
  ss.F = Matrix::Zero(c, c);
  ss.E = Matrix::Zero(c, n);
  ss.E_tilde = Matrix::Identity(c, c);
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const Matrix& l = transforms[static_cast<size_t>(e)];
    const int row = ss.edge_offset[static_cast<size_t>(e)];
    const int si = g.source_index(ed.tail);
    if (si >= 0) {
      ss.E.block(row, source_offset(source_dims, si), ed.bandwidth, l.cols()) = l;
      continue;
    }
    int col = 0;
    for (int in : g.in_edges(ed.tail)) {
      const int w = g.edge(in).bandwidth;
      ss.F.block(row, ss.edge_offset[static_cast<size_t>(in)], ed.bandwidth, w) = l.middleCols(col, w);
      col += w;
    }
  }
  for (NodeId r : g.receivers()) {
    const int d = degrees(g, r).first;
    Matrix ci = Matrix::Zero(d, c);
    int row = 0;
    for (int in : g.in_edges(r)) {
      const int w = g.edge(in).bandwidth;
      ci.block(row, ss.edge_offset[static_cast<size_t>(in)], w, w).setIdentity();
      row += w;
    }
    ss.C.push_back(std::move(ci));
  }
  return ss;
}

Matrix neumann_inverse(const Matrix& F) {
  const Eigen::Index c = F.rows();
  Matrix sum = Matrix::Identity(c, c);
  Matrix power = Matrix::Identity(c, c);
  const double scale = std::max(1.0, F.size() ? F.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index k = 1; k <= c; ++k) {
    power = power * F;
    if (power.isZero(0.0)) return sum;
    sum += power;
  }
  // Exactly nilpotent structures terminate above; allow rounding residue.
  if (power.size() && power.cwiseAbs().maxCoeff() > 1e-12 * std::pow(scale, static_cast<double>(c)))
    throw Error(ErrorCode::NotNilpotent, "F is not nilpotent; the network has a cycle");
  return sum;
}

Matrix TransferFunction::stacked() const {
  Eigen::Index rows = 0, cols = G.empty() ? 0 : G.front().cols();
  for (const Matrix& g : G) rows += g.rows();
  Matrix out(rows, cols);
  Eigen::Index off = 0;
  for (const Matrix& g : G) {
    out.middleRows(off, g.rows()) = g;
    off += g.rows();
  }
  return out;
}

TransferFunction transfer_function(const StateSpace& ss) {
  const Matrix inv = neumann_inverse(ss.F);
  TransferFunction tf;
  const Matrix ie = inv * ss.E;
  const Matrix iet = inv * ss.E_tilde;
  for (const Matrix& ci : ss.C) {
    tf.G.push_back(ci * ie);
    tf.G_tilde.push_back(ci * iet);
  }
  return tf;
}

int LayerMask::num_free() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const MaskEntry& m) { return m.free; }));
}

Matrix FactoredTransform::product(int first, int last) const {
  if (first > last) {
    const Eigen::Index d = first < num_layers() ? layers[static_cast<size_t>(first)].rows()
                                                : layers.back().cols();
    return Matrix::Identity(d, d);
  }
  Matrix out = layers[static_cast<size_t>(first)];
  for (int i = first + 1; i <= last; ++i) out = out * layers[static_cast<size_t>(i)];
  return out;
}

void FactoredTransform::assign(const EdgeTransforms& transforms) {
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerMask& m = masks[i];
    for (Eigen::Index c = 0; c < m.cols; ++c)
      for (Eigen::Index r = 0; r < m.rows; ++r) {
        const MaskEntry& me = m.at(r, c);
        layers[i](r, c) = me.free ? transforms[static_cast<size_t>(me.edge)](me.row, me.col) : me.value;
      }
  }
}

EdgeTransforms FactoredTransform::extract(const LtnGraph& g, const std::vector<int>& source_dims) const {
  const std::vector<int> cols = edge_input_dims(g, source_dims);
  EdgeTransforms out;
  for (int e = 0; e < g.num_edges(); ++e) out.emplace_back(Matrix::Zero(g.edge(e).bandwidth, cols[static_cast<size_t>(e)]));
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerMask& m = masks[i];
    for (Eigen::Index c = 0; c < m.cols; ++c)
      for (Eigen::Index r = 0; r < m.rows; ++r) {
        const MaskEntry& me = m.at(r, c);
        if (me.free) out[static_cast<size_t>(me.edge)](me.row, me.col) = layers[i](r, c);
      }
  }
  return out;
}

FactoredTransform factor_structure(const LtnGraph& g, const Layering& lay, const std::vector<int>& source_dims) {
  check_source_dims(g, source_dims);
  const int p = lay.num_factors();
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "network has no edges to factor");
  auto level = [&](NodeId v) { return lay.level[static_cast<size_t>(v)]; };
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (level(v) == 0 && !g.is_receiver(v) && !g.in_edges(v).empty())
      throw Error(ErrorCode::UnsupportedTopology, "sink node " + g.name(v) + " is not a receiver");

  FactoredTransform ft;
  // boundary b (1..p) carries edges with level(tail) >= b and level(head) <= b - 1.
  ft.boundary_edges.resize(static_cast<size_t>(p) + 1);
  for (int b = 1; b <= p; ++b) {
    auto& edges = ft.boundary_edges[static_cast<size_t>(b) - 1];
    for (int e = 0; e < g.num_edges(); ++e)
      if (level(g.edge(e).tail) >= b && level(g.edge(e).head) <= b - 1) edges.push_back(e);
    std::stable_sort(edges.begin(), edges.end(), [&](int a, int c) { return g.edge(a).head < g.edge(c).head; });
  }
  // The last slot is the source vector x; it is indexed by columns, not edges.

  auto rows_of = [&](const std::vector<int>& edges) {
    int r = 0;
    for (int e : edges) r += g.edge(e).bandwidth;
    return r;
  };
  const int n = std::accumulate(source_dims.begin(), source_dims.end(), 0);

  for (int b = 1; b <= p; ++b) {
    const auto& out_edges = ft.boundary_edges[static_cast<size_t>(b) - 1];
    const bool top = b == p;
    const std::vector<int> in_edges = top ? std::vector<int>{} : ft.boundary_edges[static_cast<size_t>(b)];
    const Eigen::Index rows = rows_of(out_edges);
    const Eigen::Index cols = top ? n : rows_of(in_edges);

    // Column offset of each edge in the layer input.
    std::vector<int> in_off(static_cast<size_t>(g.num_edges()), -1);
    for (int k = 0, off = 0; k < static_cast<int>(in_edges.size()); ++k) {
      in_off[static_cast<size_t>(in_edges[static_cast<size_t>(k)])] = off;
      off += g.edge(in_edges[static_cast<size_t>(k)]).bandwidth;
    }

    LayerMask mask;
    mask.rows = rows;
    mask.cols = cols;
    mask.entries.assign(static_cast<size_t>(rows * cols), MaskEntry{});
    auto set = [&](Eigen::Index r, Eigen::Index c, const MaskEntry& m) { mask.entries[static_cast<size_t>(c * rows + r)] = m; };

    int row = 0;
    for (int e : out_edges) {
      const Edge& ed = g.edge(e);
      if (!top && in_off[static_cast<size_t>(e)] >= 0) {
        for (int k = 0; k < ed.bandwidth; ++k) set(row + k, in_off[static_cast<size_t>(e)] + k, MaskEntry{false, -1, -1, -1, 1.0});
      } else {
        const int si = g.source_index(ed.tail);
        if (si >= 0) {
          const int off = source_offset(source_dims, si);
          for (int k = 0; k < ed.bandwidth; ++k)
            for (int j = 0; j < source_dims[static_cast<size_t>(si)]; ++j) set(row + k, off + j, MaskEntry{true, e, k, j, 0.0});
        } else {
          int col = 0;
          for (int in : g.in_edges(ed.tail)) {
            const int w = g.edge(in).bandwidth;
            const int base = in_off[static_cast<size_t>(in)];
            if (base < 0) throw Error(ErrorCode::NumericalFailure, "layering does not expose relay input");
            for (int k = 0; k < ed.bandwidth; ++k)
              for (int j = 0; j < w; ++j) set(row + k, base + j, MaskEntry{true, e, k, col + j, 0.0});
            col += w;
          }
        }
      }
      row += ed.bandwidth;
    }
    Matrix layer(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) layer(r, c) = mask.at(r, c).free ? 0.0 : mask.at(r, c).value;
    ft.layers.push_back(std::move(layer));
    ft.masks.push_back(std::move(mask));
  }
  ft.boundary_edges.pop_back();
  return ft;
}

FactoredTransform factor_layers(const LtnGraph& g, const Layering& lay, const std::vector<int>& source_dims,
                                const EdgeTransforms& transforms) {
  check_transforms(g, source_dims, transforms);
  FactoredTransform ft = factor_structure(g, lay, source_dims);
  ft.assign(transforms);
  return ft;
}

EqualityConstraints masks_to_equalities(const FactoredTransform& ft, int layer) {
  if (layer < 0 || layer >= ft.num_layers()) throw Error(ErrorCode::InvalidArgument, "layer index out of range");
  const LayerMask& m = ft.masks[static_cast<size_t>(layer)];
  const auto n = static_cast<Eigen::Index>(m.entries.size());
  const Eigen::Index pinned = n - m.num_free();
  EqualityConstraints eq{Matrix::Zero(pinned, n), Vector::Zero(pinned)};
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const MaskEntry& me = m.entries[static_cast<size_t>(k)];
    if (me.free) continue;
    eq.Phi(r, k) = 1.0;
    eq.phi(r) = me.value;
    ++r;
  }
  return eq;
}

std::vector<Vector> simulate_flow(const LtnGraph& g, const std::vector<int>& source_dims,
                                  const EdgeTransforms& transforms, const Vector& x, const std::vector<Vector>& z) {
  check_transforms(g, source_dims, transforms);
  const int n = std::accumulate(source_dims.begin(), source_dims.end(), 0);
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "source sample has wrong length");
  if (!z.empty() && static_cast<int>(z.size()) != g.num_edges())
    throw Error(ErrorCode::DimensionMismatch, "one noise vector per edge required");

  std::vector<Vector> signal(static_cast<size_t>(g.num_edges()));
  auto node_input = [&](NodeId v) {
    const int si = g.source_index(v);
    if (si >= 0) return Vector(x.segment(source_offset(source_dims, si), source_dims[static_cast<size_t>(si)]));
    Vector in(degrees(g, v).first);
    int off = 0;
    for (int e : g.in_edges(v)) {
      in.segment(off, g.edge(e).bandwidth) = signal[static_cast<size_t>(e)];
      off += g.edge(e).bandwidth;
    }
    return in;
  };
  for (NodeId v : topological_order(g)) {
    if (g.out_edges(v).empty()) continue;
    const Vector in = node_input(v);
    for (int e : g.out_edges(v)) {
      Vector y = transforms[static_cast<size_t>(e)] * in;
      if (!z.empty() && z[static_cast<size_t>(e)].size() > 0) {
        if (z[static_cast<size_t>(e)].size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "noise length");
        y += z[static_cast<size_t>(e)];
      }
      signal[static_cast<size_t>(e)] = std::move(y);
    }
  }
  std::vector<Vector> out;
  for (NodeId r : g.receivers()) out.push_back(node_input(r));
  return out;
}

}  // namespace ltn
