/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <vector>

#include "ltn/graph.hpp"
#include "ltn/numerics.hpp"

namespace ltn {

// One matrix per edge, in edge order. The matrix on edge (u, v) has
// bandwidth(u, v) rows and either dim(x_u) columns (u a source) or the
// bandwidth-weighted in-degree of u (u a relay). A relay's input is the
// concatenation of its incoming edge signals in edge-index order.
using EdgeTransforms = std::vector<Matrix>;

std::vector<int> edge_input_dims(const LtnGraph& graph, const std::vector<int>& source_dims);
void check_transforms(const LtnGraph& graph, const std::vector<int>& source_dims, const EdgeTransforms& transforms);

// mu = F mu + E x + E_tilde z, y_i = C_i mu, where mu stacks edge signals.
struct StateSpace {
  Matrix F;
  Matrix E;
  Matrix E_tilde;
  std::vector<Matrix> C;        // per receiver
  std::vector<int> edge_offset;  // first row of each edge in mu
};

StateSpace build_state_space(const LtnGraph& graph, const std::vector<int>& source_dims,
                             const EdgeTransforms& transforms);

// (I - F)^{-1} as a finite power series; throws NotNilpotent otherwise.
Matrix neumann_inverse(const Matrix& F);

struct TransferFunction {
  std::vector<Matrix> G;        // y_i = G_i x + G_tilde_i z
  std::vector<Matrix> G_tilde;
  Matrix stacked() const;       // all receivers, in receiver order
};

TransferFunction transfer_function(const StateSpace& ss);

struct MaskEntry {
  bool free = false;
  int edge = -1;  // for free entries: the edge matrix entry they alias
  int row = -1;
  int col = -1;
  double value = 0.0;  // for pinned entries
};

struct LayerMask {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<MaskEntry> entries;  // column-major, matching vec()
  const MaskEntry& at(Eigen::Index r, Eigen::Index c) const { return entries[static_cast<size_t>(c * rows + r)]; }
  int num_free() const;
};

// T = T_1 T_2 ... T_p with layers[0] = T_1. T_p acts on x; T_1 produces the
// receiver inputs. boundary_edges[k] lists, in row order, the edges whose
// signals form the output of layers[k]; entry 0 is the receiver side.
struct FactoredTransform {
  std::vector<Matrix> layers;
  std::vector<LayerMask> masks;
  std::vector<std::vector<int>> boundary_edges;

  int num_layers() const { return static_cast<int>(layers.size()); }
  // layers[first] * ... * layers[last]; identity of the matching size when first > last.
  Matrix product(int first, int last) const;
  Matrix product() const { return product(0, num_layers() - 1); }
  // Writes the free entries of `transforms` into the layers.
  void assign(const EdgeTransforms& transforms);
  EdgeTransforms extract(const LtnGraph& graph, const std::vector<int>& source_dims) const;
};

// Layer structure with all free entries zero.
FactoredTransform factor_structure(const LtnGraph& graph, const Layering& layering,
                                   const std::vector<int>& source_dims);
FactoredTransform factor_layers(const LtnGraph& graph, const Layering& layering,
                                const std::vector<int>& source_dims, const EdgeTransforms& transforms);

// Phi t = phi on t = vec(layers[layer]); one row per pinned entry.
struct EqualityConstraints {
  Matrix Phi;
  Vector phi;
};

EqualityConstraints masks_to_equalities(const FactoredTransform& ft, int layer);

// Edge-by-edge propagation in topological order. `z` holds one noise vector
// per edge (empty vector means zero). Returns one output per receiver.
std::vector<Vector> simulate_flow(const LtnGraph& graph, const std::vector<int>& source_dims,
                                  const EdgeTransforms& transforms, const Vector& x,
                                  const std::vector<Vector>& z);

}  // namespace ltn
