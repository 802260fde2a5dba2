/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <optional>
#include <vector>

#include "ltn/graph.hpp"
#include "ltn/numerics.hpp"
#include "ltn/source_model.hpp"

namespace ltn {

// tr(Sigma_nu W^T W) minus the c largest eigenvalues of
// W Sigma_nu_xi Sigma_xi^-1 Sigma_xi_nu W^T.
double ideal_bound(const InnovationPair& innov, const Matrix& W, int c);

// Optimal value of the relaxed program for unit-variance channel noise.
double sdp_bound(const InnovationPair& innov, const Matrix& W, const Matrix& sigma_x, double P);

// (c / 2) log2(1 + P / c) bits per channel use.
double awgn_capacity(int c, double P);

struct Waterfill {
  double rate = 0.0;        // bits
  double distortion = 0.0;  // sum of components
  std::vector<double> components;
  double theta = 0.0;
};

// D_i = min(theta, lambda_i). Either the total distortion or the rate is given.
Waterfill reverse_waterfill_distortion(const std::vector<double>& eigs, double D);
Waterfill reverse_waterfill_rate(const std::vector<double>& eigs, double R);

// Data for bounding the distortion of the receivers behind one cut: the
// sources on the far side act as side information.
struct CutProblem {
  InnovationPair innov;
  Matrix W;
  Matrix sigma_x;     // marginal covariance of the sources on the F side
  int bandwidth = 0;
  double power = 0.0;
  double noise_floor = 1.0;  // smallest noise eigenvalue over crossing edges
};

CutProblem cut_problem(const LtnGraph& graph, const SourceModel& model, const Matrix& W, const Cut& cut,
                       bool require_power);

// Smallest D with R(D) at most the cut capacity, for Gaussian sources.
double info_bound(const LtnGraph& graph, const SourceModel& model, const Matrix& W, const Cut& cut);

struct BoundReport {
  int cut_id = 0;
  Cut cut;
  int C_F = 0;
  double P_F = 0.0;
  double d_ideal = 0.0;
  std::optional<double> d_sdp;
  double d_noisy_lb = 0.0;  // max(d_ideal, d_sdp)
  std::optional<double> d_info;
};

struct CutsetScan {
  std::vector<BoundReport> reports;
  int tightest = -1;   // index into reports
  double bound = 0.0;  // tightest lower bound
};

// Bounds every enumerated cut. With `noisy`, crossing edges need power caps
// and the SDP and (for Gaussian models) information bounds are included.
CutsetScan cutset_scan(const LtnGraph& graph, const SourceModel& model, const Matrix& W, bool noisy);

}  // namespace ltn
