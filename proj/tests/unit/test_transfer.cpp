#include <gtest/gtest.h>

#include <random>

#include "ltn/error.hpp"
#include "ltn/transfer.hpp"

using namespace ltn;

namespace {

// v1 -> v2 -> v3 plus v1 -> v3, scalar links, edge order 12, 13, 23.
LtnGraph relay_chain(int bw = 1) {
  return LtnGraph({"v1", "v2", "v3"}, {{0, 1, bw, {}, {}}, {0, 2, bw, {}, {}}, {1, 2, bw, {}, {}}}, {0}, {2});
}

EdgeTransforms scalars(double l12, double l13, double l23) {
  return {Matrix::Constant(1, 1, l12), Matrix::Constant(1, 1, l13), Matrix::Constant(1, 1, l23)};
}

LtnGraph butterfly() {
  std::vector<Edge> e{{0, 4, 1, {}, {}}, {0, 2, 2, {}, {}}, {1, 2, 2, {}, {}}, {1, 5, 1, {}, {}},
                      {2, 3, 2, {}, {}}, {3, 4, 2, {}, {}}, {3, 5, 2, {}, {}}};
  return LtnGraph({"v1", "v2", "v3", "v4", "v5", "v6"}, e, {0, 1}, {4, 5});
}

EdgeTransforms random_transforms(const LtnGraph& g, const std::vector<int>& dims, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const std::vector<int> cols = edge_input_dims(g, dims);
  EdgeTransforms l;
  for (int e = 0; e < g.num_edges(); ++e) {
    Matrix m(g.edge(e).bandwidth, cols[static_cast<size_t>(e)]);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = nd(rng);
    l.push_back(m);
  }
  return l;
}

struct MaskCounts {
  int free = 0, pinned_one = 0, pinned_zero = 0;
};

MaskCounts count(const LayerMask& m) {
  MaskCounts c;
  for (const MaskEntry& e : m.entries) {
    if (e.free) ++c.free;
    else if (e.value == 1.0) ++c.pinned_one;
    else if (e.value == 0.0) ++c.pinned_zero;
  }
  return c;
}

}  // namespace

TEST(EdgeInputDims, SourcesSeeTheirBlockRelaysTheirInEdges) {
  const LtnGraph g = butterfly();
  EXPECT_EQ(edge_input_dims(g, {4, 4}), (std::vector<int>{4, 4, 4, 4, 4, 2, 2}));
}

TEST(StateSpace, RelayBlockIsTheOnlyNonzero) {
  const StateSpace ss = build_state_space(relay_chain(), {1}, scalars(2, 3, 5));
  Matrix expect = Matrix::Zero(3, 3);
  expect(2, 0) = 5.0;
  EXPECT_EQ(ss.F, expect);
  EXPECT_TRUE((ss.F * ss.F).isZero());
  EXPECT_EQ(ss.E_tilde, Matrix::Identity(3, 3));
}

TEST(StateSpace, NoRelaysMeansZeroF) {
  const LtnGraph g({"s", "t"}, {{0, 1, 2, {}, {}}}, {0}, {1});
  const StateSpace ss = build_state_space(g, {3}, {Matrix::Ones(2, 3)});
  EXPECT_TRUE(ss.F.isZero());
}

TEST(StateSpace, ChecksTransformShapes) {
  try {
    build_state_space(relay_chain(), {1}, {Matrix::Ones(1, 2), Matrix::Ones(1, 1), Matrix::Ones(1, 1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(NeumannInverse, NilpotentAndNot) {
  Matrix f = Matrix::Zero(3, 3);
  f(1, 0) = 2;
  f(2, 1) = 3;
  EXPECT_TRUE(neumann_inverse(f).isApprox((Matrix::Identity(3, 3) - f).inverse()));
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  try {
    neumann_inverse(swap);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotNilpotent);
  }
}

TEST(TransferFunction, RelayChainScalars) {
  const TransferFunction tf = transfer_function(build_state_space(relay_chain(), {1}, scalars(2, 3, 5)));
  ASSERT_EQ(tf.G.size(), 1u);
  EXPECT_EQ(tf.G[0], (Matrix(2, 1) << 3, 10).finished());
  EXPECT_EQ(tf.G_tilde[0], (Matrix(2, 3) << 0, 1, 0, 5, 0, 1).finished());
}

TEST(TransferFunction, SingleEdgeIsItsTransform) {
  const LtnGraph g({"s", "t"}, {{0, 1, 2, {}, {}}}, {0}, {1});
  Matrix l(2, 3);
  l << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(transfer_function(build_state_space(g, {3}, {l})).G[0], l);
}

TEST(TransferFunction, ButterflyMatchesHandProduct) {
  std::mt19937_64 rng(5);
  const LtnGraph g = butterfly();
  const EdgeTransforms l = random_transforms(g, {4, 4}, rng);
  const TransferFunction tf = transfer_function(build_state_space(g, {4, 4}, l));
  // Receiver inputs in edge order: v5 gets (v1v5, v4v5), v6 gets (v2v6, v4v6).
  Matrix mix(4, 8);
  mix << l[1], Matrix::Zero(2, 4), Matrix::Zero(2, 4), l[2];
  const Matrix y34 = l[4] * mix;
  Matrix g5(3, 8), g6(3, 8);
  g5 << l[0], Matrix::Zero(1, 4), l[5] * y34;
  g6 << Matrix::Zero(1, 4), l[3], l[6] * y34;
  EXPECT_TRUE(tf.G[0].isApprox(g5, 1e-12));
  EXPECT_TRUE(tf.G[1].isApprox(g6, 1e-12));
}

TEST(SimulateFlow, ScalarHandPropagation) {
  const std::vector<Vector> y = simulate_flow(relay_chain(), {1}, scalars(2, 3, 5), Vector::Ones(1),
                                              {Vector::Ones(1), Vector::Ones(1), Vector::Ones(1)});
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0], (Vector(2) << 4, 16).finished());
}

TEST(SimulateFlow, ZeroNoiseIsTransferMap) {
  std::mt19937_64 rng(6);
  const LtnGraph g = butterfly();
  const EdgeTransforms l = random_transforms(g, {4, 4}, rng);
  const Vector x = Vector::LinSpaced(8, -1.0, 2.0);
  const std::vector<Vector> y = simulate_flow(g, {4, 4}, l, x, {});
  const TransferFunction tf = transfer_function(build_state_space(g, {4, 4}, l));
  for (size_t i = 0; i < y.size(); ++i) EXPECT_LT((y[i] - tf.G[i] * x).norm(), 1e-12);
}

TEST(FactorLayers, ButterflyBlockPattern) {
  const LtnGraph g = butterfly();
  const FactoredTransform ft = factor_structure(g, layer_partition(g), {4, 4});
  ASSERT_EQ(ft.num_layers(), 3);
  // T1: receiver inputs from (v1v5 pass-through, v3v4 output, v2v6 pass-through).
  EXPECT_EQ(ft.layers[0].rows(), 6);
  EXPECT_EQ(ft.layers[0].cols(), 4);
  MaskCounts c = count(ft.masks[0]);
  EXPECT_EQ(c.free, 8);       // L45, L46
  EXPECT_EQ(c.pinned_one, 2);  // the two pass-through identities
  // T2: L34 split over the two source blocks feeding v3.
  EXPECT_EQ(ft.layers[1].rows(), 4);
  EXPECT_EQ(ft.layers[1].cols(), 6);
  c = count(ft.masks[1]);
  EXPECT_EQ(c.free, 8);
  EXPECT_EQ(c.pinned_one, 2);
  // T3: block diagonal source encoders.
  EXPECT_EQ(ft.layers[2].rows(), 6);
  EXPECT_EQ(ft.layers[2].cols(), 8);
  EXPECT_EQ(count(ft.masks[2]).free, 24);
}

TEST(FactorLayers, RelayChainIdentityBesideRelayBlock) {
  const LtnGraph g = relay_chain();
  const FactoredTransform ft = factor_layers(g, layer_partition(g), {1}, scalars(2, 3, 5));
  ASSERT_EQ(ft.num_layers(), 2);
  // Rows (y13, y23); columns follow the boundary edges (v1v2, v1v3).
  EXPECT_EQ(ft.boundary_edges[0], (std::vector<int>{1, 2}));
  EXPECT_EQ(ft.boundary_edges[1], (std::vector<int>{0, 1}));
  EXPECT_EQ(ft.layers[0], (Matrix(2, 2) << 0, 1, 5, 0).finished());
  EXPECT_FALSE(ft.masks[0].at(0, 1).free);
  EXPECT_TRUE(ft.masks[0].at(1, 0).free);
  EXPECT_EQ(ft.masks[0].at(1, 0).edge, 2);
  EXPECT_EQ(ft.layers[1], (Matrix(2, 1) << 2, 3).finished());
}

TEST(FactorLayers, SingleLayerBlockDiagonal) {
  const LtnGraph g({"a", "b", "r"}, {{0, 2, 2, {}, {}}, {1, 2, 1, {}, {}}}, {0, 1}, {2});
  std::mt19937_64 rng(7);
  const EdgeTransforms l = random_transforms(g, {3, 2}, rng);
  const FactoredTransform ft = factor_layers(g, layer_partition(g), {3, 2}, l);
  ASSERT_EQ(ft.num_layers(), 1);
  EXPECT_EQ(ft.layers[0].topLeftCorner(2, 3), l[0]);
  EXPECT_EQ(ft.layers[0].bottomRightCorner(1, 2), l[1]);
  EXPECT_TRUE(ft.layers[0].topRightCorner(2, 2).isZero());
  EXPECT_EQ(count(ft.masks[0]).free, 8);
}

TEST(FactorLayers, ProductEqualsTransferAndRoundTrips) {
  std::mt19937_64 rng(8);
  const LtnGraph g = butterfly();
  const EdgeTransforms l = random_transforms(g, {4, 4}, rng);
  FactoredTransform ft = factor_layers(g, layer_partition(g), {4, 4}, l);
  EXPECT_TRUE(ft.product().isApprox(transfer_function(build_state_space(g, {4, 4}, l)).stacked(), 1e-12));
  const EdgeTransforms back = ft.extract(g, {4, 4});
  for (size_t e = 0; e < l.size(); ++e) EXPECT_EQ(back[e], l[e]);
  EXPECT_EQ(ft.product(1, 0), Matrix::Identity(ft.layers[0].cols(), ft.layers[0].cols()));
}

TEST(FactorLayers, DanglingRelayUnsupported) {
  const LtnGraph g({"s", "m", "r"}, {{0, 2, 1, {}, {}}, {0, 1, 1, {}, {}}}, {0}, {2});
  try {
    factor_structure(g, layer_partition(g), {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedTopology);
  }
}

TEST(MasksToEqualities, CountsAndSatisfiedByLayers) {
  std::mt19937_64 rng(9);
  const LtnGraph g = butterfly();
  const FactoredTransform ft = factor_layers(g, layer_partition(g), {4, 4}, random_transforms(g, {4, 4}, rng));
  const int expected_pinned[] = {6 * 4 - 8, 4 * 6 - 8, 6 * 8 - 24};
  for (int k = 0; k < 3; ++k) {
    const EqualityConstraints eq = masks_to_equalities(ft, k);
    EXPECT_EQ(eq.Phi.rows(), expected_pinned[k]);
    EXPECT_TRUE(is_canonical_pinning(eq.Phi));
    EXPECT_LT((eq.Phi * vec(ft.layers[static_cast<size_t>(k)]) - eq.phi).norm(), 1e-15);
  }
}

TEST(MasksToEqualities, SingleSourceOnlyOffBlockZeros) {
  const LtnGraph g({"s", "r1", "r2"}, {{0, 1, 2, {}, {}}, {0, 2, 1, {}, {}}}, {0}, {1, 2});
  const FactoredTransform ft = factor_structure(g, layer_partition(g), {3});
  const EqualityConstraints eq = masks_to_equalities(ft, 0);
  EXPECT_EQ(eq.Phi.rows(), 0);  // both encoders read all of x
  EXPECT_EQ(count(ft.masks[0]).free, 9);
}
