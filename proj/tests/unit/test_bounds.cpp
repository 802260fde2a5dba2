#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "ltn/bounds.hpp"
#include "ltn/error.hpp"
#include "ltn/experiments.hpp"
#include "ltn/opt_noisy.hpp"

using namespace ltn;

namespace {

InnovationPair no_side_info(const Matrix& s) { return {s, s, s}; }

// Residual of the best rank-k approximation, from Eigen's solver directly.
double klt_residual(const Matrix& s, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Vector ev = es.eigenvalues();  // ascending
  return ev.head(ev.size() - k).sum();
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(IdealBound, DiagonalResidual) {
  Matrix s = Matrix::Zero(3, 3);
  s.diagonal() << 4, 2, 1;
  EXPECT_NEAR(ideal_bound(no_side_info(s), Matrix::Identity(3, 3), 2), 1.0, 1e-12);
}

TEST(IdealBound, ZeroBandwidthLeavesConditionalError) {
  const Matrix one = Matrix::Identity(1, 1), c = Matrix::Constant(1, 1, 0.6);
  const InnovationPair p = innovations(one, one, one, one, c, c);
  EXPECT_NEAR(ideal_bound(p, one, 0), 0.64, 1e-15);
}

TEST(IdealBound, ButterflyMergedCut) {
  const Matrix s = butterfly_covariance();
  EXPECT_NEAR(ideal_bound(no_side_info(s), Matrix::Identity(8, 8), 4), klt_residual(s, 4), 1e-12);
  EXPECT_NEAR(ideal_bound(no_side_info(s), Matrix::Identity(8, 8), 4), 2.3243, 5e-4);
  EXPECT_NEAR(ideal_bound(no_side_info(s), Matrix::Identity(8, 8), 6), klt_residual(s, 6), 1e-12);
}

TEST(SdpBound, ZeroPowerAndScalar) {
  const Matrix s = gauss_markov(3, 0.5);
  EXPECT_NEAR(sdp_bound(no_side_info(s), Matrix::Identity(3, 3), s, 0.0), s.trace(), 1e-12);
  const Matrix one = Matrix::Identity(1, 1);
  EXPECT_NEAR(sdp_bound(no_side_info(one), one, one, 3.0), 0.25, 1e-8);
}

TEST(SdpBound, LargePowerReachesConditionalFloor) {
  // nu = xi + independent noise of variance 0.5 per entry: nothing below 1.0 is reachable.
  const Matrix s = gauss_markov(2, 0.6);
  const InnovationPair p{s, Matrix(s + 0.5 * Matrix::Identity(2, 2)), s};
  const double floor = ideal_bound(p, Matrix::Identity(2, 2), 2);
  EXPECT_NEAR(floor, 1.0, 1e-12);
  const double d = sdp_bound(p, Matrix::Identity(2, 2), s, 1e6 * s.trace());
  EXPECT_NEAR(d, floor, 0.01 * floor);
}

TEST(SdpBound, RelaxationIgnoresBandwidth) {
  // With one channel use for two components the ideal bound keeps the weaker
  // eigenvalue; the rank-free relaxation drives the distortion towards zero.
  const Matrix s = gauss_markov(2, 0.6);
  const double ideal = ideal_bound(no_side_info(s), Matrix::Identity(2, 2), 1);
  const double sdp = sdp_bound(no_side_info(s), Matrix::Identity(2, 2), s, 1e6 * s.trace());
  EXPECT_NEAR(ideal, 0.4, 1e-12);
  EXPECT_LT(sdp, 1e-3);
}

TEST(AwgnCapacity, Examples) {
  EXPECT_EQ(awgn_capacity(4, 4.0), 2.0);
  EXPECT_EQ(awgn_capacity(3, 0.0), 0.0);
  EXPECT_NEAR(awgn_capacity(12, 12.0), 6.0, 1e-15);
}

TEST(ReverseWaterfill, ZeroRateKeepsPrior) {
  const Waterfill w = reverse_waterfill_rate({3.0, 1.0, 0.5}, 0.0);
  EXPECT_NEAR(w.distortion, 4.5, 1e-12);
}

TEST(ReverseWaterfill, TwoComponents) {
  const Waterfill w = reverse_waterfill_distortion({2.0, 1.0}, 1.5);
  EXPECT_NEAR(w.theta, 0.75, 1e-12);
  const double direct = 0.5 * std::log2(2.0 / 0.75) + 0.5 * std::log2(1.0 / 0.75);
  EXPECT_NEAR(w.rate, direct, 1e-12);
  EXPECT_NEAR(w.rate, 0.9150, 1e-4);
  // Bisection oracle on theta.
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::min(mid, 2.0) + std::min(mid, 1.0) < 1.5 ? lo : hi) = mid;
  }
  EXPECT_NEAR(w.theta, lo, 1e-12);
}

TEST(ReverseWaterfill, RateDivergesAsDistortionVanishes) {
  const std::vector<double> eigs{2.0, 1.0, 0.25};
  double prev = -1.0;
  for (double d : {3.0, 1.0, 0.3, 1e-2, 1e-4, 1e-8}) {
    const double r = reverse_waterfill_distortion(eigs, d).rate;
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_GT(prev, 30.0);
}

TEST(ReverseWaterfill, RateAndDistortionAreInverse) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> eigs(5);
    for (double& e : eigs) e = u(rng);
    const double R = 0.1 * (trial + 1);
    const Waterfill w = reverse_waterfill_rate(eigs, R);
    double sum = 0.0;
    for (double c : w.components) sum += c;
    EXPECT_NEAR(sum, w.distortion, 1e-10);
    EXPECT_NEAR(reverse_waterfill_distortion(eigs, w.distortion).rate, R, 1e-8);
  }
}

TEST(ReverseWaterfill, Errors) {
  EXPECT_EQ(code_of([] { reverse_waterfill_distortion({1.0}, 2.0); }), ErrorCode::TargetOutOfRange);
  EXPECT_EQ(code_of([] { reverse_waterfill_rate({1.0}, -1.0); }), ErrorCode::TargetOutOfRange);
}

TEST(InfoBound, HighSnrFullBandwidthNearZero) {
  const Scenario s = distributed_noisy_network(1.0, 60.0);
  const double d = info_bound(s.graph, s.model, build_weight_matrix(s.model), make_cut(s.graph, s.graph.sources()));
  EXPECT_LT(d, 1e-6 * s.model.sigma_x.trace());
  EXPECT_GE(d, 0.0);
}

TEST(InfoBound, ZeroPowerIsPriorVariance) {
  Scenario s = distributed_noisy_network(0.5, 0.0);
  std::vector<Edge> edges = s.graph.edges();
  for (Edge& e : edges) e.power_cap = 0.0;
  s.graph = LtnGraph({"v1", "v2", "v3", "v4"}, edges, {0, 1, 2}, {3});
  const double d = info_bound(s.graph, s.model, build_weight_matrix(s.model), make_cut(s.graph, s.graph.sources()));
  EXPECT_NEAR(d, s.model.sigma_x.trace(), 1e-9);
}

TEST(InfoBound, BelowAchievedLinearCoding) {
  const Scenario s = distributed_noisy_network(0.25, 0.0);
  const Matrix W = build_weight_matrix(s.model);
  NoisyOptions opt;
  opt.restarts = 2;
  const double achieved = optimize_noisy(s.graph, s.model, W, opt).distortion;
  EXPECT_LT(info_bound(s.graph, s.model, W, make_cut(s.graph, s.graph.sources())), achieved);
}

TEST(InfoBound, NonGaussianRejected) {
  Scenario s = distributed_noisy_network(0.5, 0.0);
  s.model.gaussian = false;
  EXPECT_EQ(code_of([&] { info_bound(s.graph, s.model, build_weight_matrix(s.model), make_cut(s.graph, {0})); }),
            ErrorCode::NonGaussianModel);
}

TEST(CutsetScan, PointToPointEqualsIdealBound) {
  const Matrix sx = gauss_markov(4, 0.7);
  const LtnGraph g({"s", "t"}, {Edge{0, 1, 2, {}, {}}}, {0}, {1});
  SourceModel m;
  m.block_dims = {4};
  m.sigma_x = sx;
  m.targets.push_back(linear_target(1, sx, Matrix::Identity(4, 4)));
  const CutsetScan scan = cutset_scan(g, m, Matrix::Identity(4, 4), false);
  ASSERT_EQ(scan.reports.size(), 1u);
  EXPECT_NEAR(scan.bound, klt_residual(sx, 2), 1e-12);
}

TEST(CutsetScan, ButterflyTightestCut) {
  for (Assignment a : {Assignment::Direct, Assignment::Crossed}) {
    const Scenario s = butterfly_network(butterfly_covariance(), a);
    const CutsetScan scan = cutset_scan(s.graph, s.model, build_weight_matrix(s.model), false);
    ASSERT_EQ(scan.reports.size(), 9u);
    EXPECT_NEAR(scan.bound, 2.3243, 5e-4);
    const BoundReport& t = scan.reports[static_cast<size_t>(scan.tightest)];
    EXPECT_EQ(t.C_F, 4);
    EXPECT_EQ(t.cut.f_side.size(), 3u);
    for (const BoundReport& r : scan.reports) EXPECT_LE(r.d_ideal, scan.bound);
  }
}

TEST(CutsetScan, NoisyReportsCarryPowerAndBothBounds) {
  const Scenario s = distributed_noisy_network(1.0, 10.0);
  const CutsetScan scan = cutset_scan(s.graph, s.model, build_weight_matrix(s.model), true);
  ASSERT_EQ(scan.reports.size(), 7u);
  bool found = false;
  for (const BoundReport& r : scan.reports) {
    ASSERT_TRUE(r.d_sdp.has_value());
    ASSERT_TRUE(r.d_info.has_value());
    EXPECT_NEAR(r.d_noisy_lb, std::max(r.d_ideal, *r.d_sdp), 0.0);
    if (r.cut.sources_in_f.size() == 3) {
      found = true;
      EXPECT_EQ(r.C_F, 12);
      EXPECT_NEAR(r.P_F, 3 * 4 * 10.0, 1e-9);
    }
  }
  EXPECT_TRUE(found);
}

TEST(CutProblem, RequiresPowerWhenAsked) {
  const Scenario s = butterfly_network(butterfly_covariance(), Assignment::Direct);
  EXPECT_EQ(code_of([&] {
              cut_problem(s.graph, s.model, build_weight_matrix(s.model), make_cut(s.graph, {0}), true);
            }),
            ErrorCode::MissingPowerCap);
}
