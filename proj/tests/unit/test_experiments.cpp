#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ltn/config.hpp"
#include "ltn/csv.hpp"
#include "ltn/error.hpp"
#include "ltn/experiments.hpp"

using namespace ltn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ltn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
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

TEST(ClassifyMode, Thresholds) {
  EXPECT_EQ(classify_mode(5, 11), NetworkMode::Distributed);
  EXPECT_EQ(classify_mode(8, 11), NetworkMode::Hybrid);
  EXPECT_EQ(classify_mode(11, 11), NetworkMode::PointToPoint);
  EXPECT_EQ(classify_mode(14, 11), NetworkMode::PointToPoint);
  EXPECT_EQ(classify_mode(6, 11), NetworkMode::Hybrid);
  EXPECT_EQ(classify_mode(5, 10), NetworkMode::Distributed);
  EXPECT_EQ(classify_mode(6, 10), NetworkMode::Hybrid);
  EXPECT_THROW(classify_mode(0, 11), Error);
}

TEST(Scenarios, ShapesMatchTheirDescriptions) {
  const Scenario h = hybrid_network(8, 11, hybrid_random_cov(30, 1), 15, 15);
  EXPECT_EQ(h.graph.num_edges(), 3);
  EXPECT_EQ(h.model.target_dim(), 30);
  const Scenario d = distributed_noisy_network(0.75, 20.0);
  EXPECT_EQ(d.graph.edge(0).bandwidth, 3);
  EXPECT_NEAR(*d.graph.edge(0).power_cap, 300.0, 1e-9);
  const Scenario b = butterfly_network(butterfly_covariance(), Assignment::Crossed, 2.0, 1.0);
  EXPECT_EQ(b.model.targets[0].sigma_rx, block_selector({4, 4}, 1) * butterfly_covariance());
  EXPECT_EQ(b.model.targets[0].weight, 2.0);
}

TEST(ButterflyCovariance, SymmetricPositiveDefinite) {
  const Matrix s = butterfly_covariance();
  EXPECT_EQ(s, s.transpose());
  EXPECT_GT(min_eigenvalue(s), 0.0);
  EXPECT_DOUBLE_EQ(s(0, 0), 2.4);
  EXPECT_DOUBLE_EQ(s(2, 5), 0.6);
  EXPECT_DOUBLE_EQ(s(7, 6), 0.6);
}

TEST(RandomProjections, ReproducibleAndWorseThanOptimized) {
  const Scenario s = butterfly_network(butterfly_covariance(), Assignment::Direct);
  const Matrix W = build_weight_matrix(s.model);
  EXPECT_EQ(baseline_random_projections(s.graph, s.model, W, 1, 5), baseline_random_projections(s.graph, s.model, W, 1, 5));
  const double mean = baseline_random_projections(s.graph, s.model, W, 100, 1);
  EXPECT_GE(mean, 3.8);
  EXPECT_LE(mean, 4.8);
  EXPECT_GE(mean, optimize_ideal(s.graph, s.model, W).distortion);
  EXPECT_THROW(baseline_random_projections(s.graph, s.model, W, 0, 1), Error);
}

TEST(RoutingBaseline, DocumentedConstructions) {
  const Scenario d = butterfly_network(butterfly_covariance(), Assignment::Direct);
  const Scenario c = butterfly_network(butterfly_covariance(), Assignment::Crossed);
  const BaselineResult rd = baseline_routing_nc(d.graph, d.model, Assignment::Direct);
  const BaselineResult rc = baseline_routing_nc(c.graph, c.model, Assignment::Crossed);
  EXPECT_NEAR(rd.sum, 2.7029, 0.02);
  EXPECT_NEAR(rc.sum, 3.8170, 0.05);
  EXPECT_NEAR(rd.per_receiver[0] + rd.per_receiver[1], rd.sum, 1e-12);
}

TEST(RoutingBaseline, EqualVariancesTieBreakDeterministically) {
  const Scenario s = butterfly_network(Matrix::Identity(8, 8), Assignment::Direct);
  const BaselineResult a = baseline_routing_nc(s.graph, s.model, Assignment::Direct);
  const BaselineResult b = baseline_routing_nc(s.graph, s.model, Assignment::Direct);
  EXPECT_EQ(a.sum, b.sum);
  for (size_t e = 0; e < a.transforms.size(); ++e) EXPECT_EQ(a.transforms[e], b.transforms[e]);
  EXPECT_NEAR(a.sum, 8.0 - 4.0, 1e-12);  // each receiver recovers two of its four unit-variance components
}

TEST(RoutingBaseline, OtherTopologiesRejected) {
  const Scenario h = hybrid_network(2, 3, gauss_markov(4, 0.5), 2, 2);
  EXPECT_EQ(code_of([&] { baseline_routing_nc(h.graph, h.model, Assignment::Direct); }),
            ErrorCode::UnsupportedTopology);
}

TEST(RunHybrid, ModesAndBounds) {
  HybridConfig cfg;
  cfg.c34 = 4;
  cfg.n1 = cfg.n2 = 3;
  cfg.c_values = {1, 2, 3, 4, 5};
  cfg.trace_c = 3;
  cfg.solver.restarts = 3;
  const HybridResult r = run_hybrid(cfg);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_EQ(r.rows[1].mode, NetworkMode::Distributed);
  EXPECT_EQ(r.rows[2].mode, NetworkMode::Hybrid);
  EXPECT_EQ(r.rows[3].mode, NetworkMode::PointToPoint);
  for (const HybridRow& row : r.rows) EXPECT_GE(row.distortion, row.bound_ideal - 1e-9);
  for (size_t i = 1; i < r.rows.size(); ++i) EXPECT_LE(r.rows[i].distortion, r.rows[i - 1].distortion + 1e-6);
  EXPECT_EQ(r.traces.size(), 3u);
}

TEST(RunDistributedNoisy, AchievedDominatesBounds) {
  NoisyGridConfig cfg;
  cfg.alphas = {0.25, 1.0};
  cfg.snr_db = {-10.0, 10.0, 30.0};
  cfg.restarts = 2;
  const std::vector<NoisyGridRow> rows = run_distributed_noisy(cfg);
  ASSERT_EQ(rows.size(), 6u);
  for (const NoisyGridRow& r : rows) {
    EXPECT_GE(r.distortion, std::max(r.bound_ideal, r.bound_sdp) - 1e-6);
    EXPECT_LE(r.bound_info, r.distortion);
  }
  EXPECT_EQ(rows[3].alpha, 1.0);
  EXPECT_EQ(rows[3].snr_db, -10.0);
}

TEST(RunDistributedNoisy, HighSnrInformationBoundVanishes) {
  const Scenario s = distributed_noisy_network(1.0, 30.0);
  const NoisyGridRow r = noisy_grid_bounds(s, 1.0, 30.0);
  NoisyOptions opt;
  opt.restarts = 1;
  const double achieved = optimize_noisy(s.graph, s.model, build_weight_matrix(s.model), opt).distortion;
  EXPECT_LT(r.bound_info, 1e-3 * s.model.sigma_x.trace());
  EXPECT_GT(achieved, r.bound_info);
}

TEST(RunMultipleUnicast, TableRegionAndHull) {
  UnicastConfig cfg;
  cfg.weights = 8;
  cfg.trials = 10;
  cfg.solver.restarts = 6;
  const UnicastResult r = run_multiple_unicast(cfg);
  ASSERT_EQ(r.table.size(), 8u);
  ASSERT_EQ(r.region.size(), 16u);
  for (const RegionPoint& p : r.region) {
    EXPECT_NEAR(p.w5 / p.w6, p.ratio, 1e-12);
    EXPECT_GE(p.w5 * p.d5 + p.w6 * p.d6, p.bound - 1e-9);
  }
  // No hull vertex lies strictly above a convex combination of two other points.
  for (const RegionPoint& v : r.region) {
    if (!v.on_hull) continue;
    for (const RegionPoint& a : r.region)
      for (const RegionPoint& b : r.region) {
        if (a.assignment != v.assignment || b.assignment != v.assignment) continue;
        if (!(a.d5 < v.d5 && v.d5 < b.d5)) continue;
        const double lam = (b.d5 - v.d5) / (b.d5 - a.d5);
        EXPECT_LE(v.d6, lam * a.d6 + (1 - lam) * b.d6 + 1e-7);
      }
  }
}

TEST(CsvOutput, FixedColumnsAndReproducible) {
  const fs::path a = scratch("csv_a"), b = scratch("csv_b");
  for (const fs::path& dir : {a, b}) {
    HybridConfig cfg;
    cfg.c34 = 3;
    cfg.n1 = cfg.n2 = 2;
    cfg.c_values = {1, 2, 3};
    cfg.trace_c = 2;
    cfg.solver.restarts = 2;
    write_hybrid_csv(dir.string(), run_hybrid(cfg));
  }
  EXPECT_EQ(slurp(a / "hybrid.csv"), slurp(b / "hybrid.csv"));
  EXPECT_EQ(slurp(a / "hybrid_trace.csv"), slurp(b / "hybrid_trace.csv"));
  EXPECT_EQ(slurp(a / "hybrid.csv").substr(0, 25), "c,mode,distortion,bound_i");
}

TEST(CsvOutput, NumberFormatAndMatrixRoundTrip) {
  EXPECT_EQ(format_number(2.32430224912345), "2.324302249");
  EXPECT_EQ(format_number(0.25), "0.25");
  const fs::path dir = scratch("matrix");
  Matrix m(2, 3);
  m << 1.5, -2, 3e-7, 4, 5, 6;
  write_matrix_csv((dir / "m.csv").string(), m);
  EXPECT_TRUE(read_matrix_csv((dir / "m.csv").string()).isApprox(m, 1e-9));
}

TEST(CsvOutput, BoundsColumns) {
  const Scenario s = butterfly_network(butterfly_covariance(), Assignment::Direct);
  const fs::path dir = scratch("bounds");
  write_bounds_csv((dir / "b.csv").string(), s.graph, cutset_scan(s.graph, s.model, build_weight_matrix(s.model), false));
  const std::string text = slurp(dir / "b.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "cut_id,members,C,P,d_ideal,d_sdp,d_info");
  EXPECT_NE(text.find("v1 v2 v3,4,0,2.324302249,,"), std::string::npos);
}

TEST(Config, ShippedNetworksLoad) {
  const fs::path dir(LTN_CONFIG_DIR);
  const NetworkConfig b = load_network_config((dir / "butterfly.json").string());
  EXPECT_EQ(b.graph.num_edges(), 7);
  EXPECT_EQ(b.model.sigma_x, butterfly_covariance());
  EXPECT_EQ(b.ideal.restarts, 20);
  EXPECT_FALSE(b.noisy);
  const NetworkConfig a = load_network_config((dir / "scalar_awgn.json").string());
  EXPECT_TRUE(a.noisy);
  EXPECT_EQ(*a.graph.edge(0).power_cap, 3.0);
  EXPECT_NO_THROW(load_network_config((dir / "relay_chain.json").string()));
  EXPECT_NO_THROW(load_network_config((dir / "distributed_noisy_network.json").string()));
  EXPECT_EQ(load_hybrid_config((dir / "hybrid.json").string()).c_values.size(), 15u);
  EXPECT_EQ(load_noisy_grid_config((dir / "distributed_noisy.json").string()).snr_db.size(), 21u);
  EXPECT_EQ(load_unicast_config((dir / "multiple_unicast.json").string()).weights, 32);
}

TEST(Config, TargetsAndCovarianceKinds) {
  const std::string text = R"({
    "sources": [{"node": "a", "dim": 2}, {"node": "b", "dim": 1}],
    "receivers": [{"node": "r", "target": {"select": [0, 2]}, "weight": 4}],
    "edges": [{"tail": "a", "head": "r", "bandwidth": 1}, {"tail": "b", "head": "r"}],
    "covariance": {"kind": "inline", "matrix": [[2, 0.5, 0], [0.5, 1, 0], [0, 0, 3]]}
  })";
  const NetworkConfig c = parse_network_config(text);
  EXPECT_EQ(c.model.targets[0].sigma_r, (Matrix(2, 2) << 2, 0, 0, 3).finished());
  EXPECT_EQ(c.W, 2.0 * Matrix::Identity(2, 2));
}

TEST(Config, ErrorsAreConfigErrors) {
  const char* bad[] = {
      "not json",
      R"({"sources": []})",
      R"({"nodes": ["a", "r"], "sources": [{"node": "a", "dim": 1}], "receivers": [{"node": "r"}],
          "edges": [{"tail": "a", "head": "zz"}], "covariance": {"kind": "inline", "matrix": [[1]]}})",
      R"({"sources": [{"node": "a", "dim": 2}], "receivers": [{"node": "r"}],
          "edges": [{"tail": "a", "head": "r"}], "covariance": {"kind": "inline", "matrix": [[1]]}})",
      R"({"sources": [{"node": "a", "dim": 1}], "receivers": [{"node": "r"}],
          "edges": [{"tail": "a", "head": "r", "bandwidth": 0}], "covariance": {"kind": "inline", "matrix": [[1]]}})",
      R"({"sources": [{"node": "a", "dim": 1}], "receivers": [{"node": "r"}],
          "edges": [{"tail": "a", "head": "r"}], "covariance": {"kind": "wishart"}})",
  };
  for (const char* text : bad) EXPECT_EQ(code_of([&] { parse_network_config(text); }), ErrorCode::ConfigError) << text;
  EXPECT_EQ(code_of([] { load_network_config("/nonexistent/config.json"); }), ErrorCode::ConfigError);
}

TEST(ErrorType, CodeAndMessage) {
  const Error e(ErrorCode::CycleDetected, "v1 -> v2 -> v1");
  EXPECT_EQ(e.code(), ErrorCode::CycleDetected);
  EXPECT_EQ(std::string(e.what()), "CycleDetected: v1 -> v2 -> v1");
  EXPECT_STREQ(to_string(ErrorCode::ConfigError), "ConfigError");
}
