/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltn/bounds.hpp"
#include "ltn/graph.hpp"
#include "ltn/opt_ideal.hpp"
#include "ltn/source_model.hpp"

namespace ltn {

enum class NetworkMode { Distributed, Hybrid, PointToPoint };

const char* to_string(NetworkMode mode);

// Two sources of link bandwidth c feeding a relay whose outgoing link has c34.
NetworkMode classify_mode(int c, int c34);

struct Scenario {
  LtnGraph graph;
  SourceModel model;
};

// v1, v2 -> v3 (bandwidth c each) -> v4 (bandwidth c34); v4 estimates all of x.
Scenario hybrid_network(int c, int c34, const Matrix& sigma_x, int n1, int n2);

// `sources` encoders observing consecutive blocks of `block_dim` entries of a
// Gauss-Markov vector, each with a noisy link of bandwidth round(alpha *
// block_dim) and power cap bandwidth * 10^(snr_db / 10) into one receiver.
Scenario distributed_noisy_network(double alpha, double snr_db, double rho = 0.8, int block_dim = 4,
                                   int sources = 3);

// Two-source, two-receiver network with a shared relay path:
// v1->v5 (1), v1->v3 (2), v2->v3 (2), v2->v6 (1), v3->v4 (2), v4->v5 (2), v4->v6 (2).
enum class Assignment { Direct, Crossed };  // Direct: v5 wants x1, v6 wants x2

const char* to_string(Assignment a);
Matrix butterfly_covariance();
Scenario butterfly_network(const Matrix& sigma_x, Assignment assignment, double w5 = 1.0, double w6 = 1.0);

// Mean weighted distortion over `trials` draws of iid standard normal edge
// transforms, each with LLSE decoders.
double baseline_random_projections(const LtnGraph& graph, const SourceModel& model, const Matrix& W, int trials,
                                   std::uint64_t seed);

struct BaselineResult {
  double sum = 0.0;  // weighted by W
  std::vector<double> per_receiver;
  EdgeTransforms transforms;
};

// Principal-component routing (Direct) or relay summation (Crossed) on the
// two-source butterfly; throws UnsupportedTopology for other graphs.
BaselineResult baseline_routing_nc(const LtnGraph& graph, const SourceModel& model, Assignment assignment);

struct HybridConfig {
  int c34 = 11;
  int n1 = 15;
  int n2 = 15;
  std::vector<int> c_values;  // empty: 1 .. c34 + 4
  int trace_c = 8;
  std::uint64_t covariance_seed = 2026;
  IdealOptions solver;
};

struct HybridRow {
  int c = 0;
  NetworkMode mode = NetworkMode::Distributed;
  double distortion = 0.0;
  double bound_ideal = 0.0;
};

struct HybridResult {
  std::vector<HybridRow> rows;
  std::vector<std::vector<double>> traces;  // per restart, for trace_c
};

HybridResult run_hybrid(const HybridConfig& config);

struct NoisyGridConfig {
  std::vector<double> alphas{0.25, 0.5, 0.75, 1.0};
  std::vector<double> snr_db;  // empty: -10 .. 30 step 2
  double rho = 0.8;
  int block_dim = 4;
  int sources = 3;
  int restarts = 4;
  std::uint64_t seed = 1;
  double eps = 1e-8;
  int max_iter = 500;
  int threads = 0;
};

struct NoisyGridRow {
  double alpha = 0.0;
  double snr_db = 0.0;
  double distortion = 0.0;
  double bound_ideal = 0.0;
  double bound_sdp = 0.0;
  double bound_info = 0.0;
};

std::vector<NoisyGridRow> run_distributed_noisy(const NoisyGridConfig& config);

// Bounds for the cut holding every source, as reported in the noisy grid.
NoisyGridRow noisy_grid_bounds(const Scenario& scenario, double alpha, double snr_db);

struct UnicastConfig {
  Matrix sigma_x;  // empty: butterfly_covariance()
  int weights = 32;
  double ratio_min = 0.01;
  double ratio_max = 100.0;
  int trials = 100;
  IdealOptions solver;
};

struct TableRow {
  Assignment assignment = Assignment::Direct;
  std::string method;
  double value = 0.0;
};

struct RegionPoint {
  Assignment assignment = Assignment::Direct;
  double ratio = 1.0;  // w5 / w6
  double w5 = 0.5;
  double w6 = 0.5;
  double d5 = 0.0;
  double d6 = 0.0;
  double bound = 0.0;  // lower bound on w5 d5 + w6 d6
  bool on_hull = false;
};

struct UnicastResult {
  std::vector<TableRow> table;
  std::vector<RegionPoint> region;
};

UnicastResult run_multiple_unicast(const UnicastConfig& config);

// CSV writers; the directory must exist.
void write_trace_csv(const std::string& path, const std::vector<std::vector<double>>& traces);
void write_bounds_csv(const std::string& path, const LtnGraph& graph, const CutsetScan& scan);
void write_hybrid_csv(const std::string& dir, const HybridResult& result);
void write_noisy_grid_csv(const std::string& path, const std::vector<NoisyGridRow>& rows);
void write_unicast_csv(const std::string& dir, const UnicastResult& result);

}  // namespace ltn
