/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltn/numerics.hpp"

namespace ltn {

using NodeId = int;

struct Edge {
  NodeId tail = 0;
  NodeId head = 0;
  int bandwidth = 1;
  std::optional<double> power_cap;
  std::optional<Matrix> noise_cov;
};

// A directed network of linear encoders. Nodes are relabelled on
// construction so that sources come first, then relays, then receivers,
// each group keeping its input order. Edge order is preserved; all edge
// endpoints refer to canonical labels.
class LtnGraph {
 public:
  LtnGraph() = default;

  // `edges`, `sources` and `receivers` use indices into `names`.
  LtnGraph(std::vector<std::string> names, std::vector<Edge> edges,
           const std::vector<NodeId>& sources, const std::vector<NodeId>& receivers);

  // Infers roles from degrees: in-degree 0 with out-edges makes a source,
  // out-degree 0 with in-edges makes a receiver. Nodes are named v1, v2, ...
  static LtnGraph from_edges(int num_nodes, std::vector<Edge> edges);

  int num_nodes() const { return static_cast<int>(names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_.at(static_cast<size_t>(e)); }
  const std::string& name(NodeId v) const { return names_.at(static_cast<size_t>(v)); }
  std::optional<NodeId> find(const std::string& name) const;

  // Canonical label of the node given as `input_index` at construction.
  NodeId canonical(NodeId input_index) const { return relabel_.at(static_cast<size_t>(input_index)); }

  const std::vector<NodeId>& sources() const { return sources_; }
  const std::vector<NodeId>& receivers() const { return receivers_; }
  std::vector<NodeId> relays() const;
  bool is_source(NodeId v) const { return role(v) & kSource; }
  bool is_receiver(NodeId v) const { return role(v) & kReceiver; }
  bool is_relay(NodeId v) const { return role(v) == 0; }
  // Position of a source among sources(), or -1.
  int source_index(NodeId v) const;
  int receiver_index(NodeId v) const;

  // Edge indices ordered by index.
  const std::vector<int>& in_edges(NodeId v) const { return in_.at(static_cast<size_t>(v)); }
  const std::vector<int>& out_edges(NodeId v) const { return out_.at(static_cast<size_t>(v)); }

  int total_bandwidth() const;

 private:
  static constexpr unsigned char kSource = 1;
  static constexpr unsigned char kReceiver = 2;
  unsigned char role(NodeId v) const { return roles_.at(static_cast<size_t>(v)); }

  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<NodeId> relabel_;
  std::vector<unsigned char> roles_;
  std::vector<NodeId> sources_;
  std::vector<NodeId> receivers_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

// Throws CycleDetected, SourceHasInEdge, ReceiverHasOutEdge, ZeroBandwidth,
// DimensionMismatch (noise covariance size) or InvalidArgument.
ValidationReport validate(const LtnGraph& graph);

// Bandwidth-weighted (in_degree, out_degree).
std::pair<int, int> degrees(const LtnGraph& graph, NodeId node);

std::vector<NodeId> topological_order(const LtnGraph& graph);

// partitions[0] holds the receivers, partitions.back() the sources.
// level[v] is the index of the partition containing v.
struct Layering {
  std::vector<std::vector<NodeId>> partitions;
  std::vector<int> level;
  int num_factors() const { return partitions.empty() ? 0 : static_cast<int>(partitions.size()) - 1; }
};

// Longest-path layering measured towards the receivers, with every source
// lifted to the top partition.
Layering layer_partition(const LtnGraph& graph);

struct Cut {
  std::vector<NodeId> f_side;          // sorted
  std::vector<NodeId> sources_in_f;    // class label: sources on the F side
  std::vector<NodeId> receivers_out;   // class label: receivers on the complement
  bool contains(NodeId v) const;
};

Cut make_cut(const LtnGraph& graph, std::vector<NodeId> f_side);

// One cut per (nonempty source subset, nonempty receiver subset) pair.
// Relays are placed by an exact minimum cut; see cut_capacity.
std::vector<Cut> enumerate_cuts(const LtnGraph& graph);

struct CutCapacity {
  int bandwidth = 0;
  double power = 0.0;
};

// Sums over edges leaving the F side. With require_power, a crossing edge
// without a power cap raises MissingPowerCap.
CutCapacity cut_capacity(const LtnGraph& graph, const Cut& cut, bool require_power = false);

}  // namespace ltn
