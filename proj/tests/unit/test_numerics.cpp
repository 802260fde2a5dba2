#include <gtest/gtest.h>

#include <random>

#include "ltn/error.hpp"
#include "ltn/numerics.hpp"

using namespace ltn;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

}  // namespace

TEST(Vec, StacksColumns) {
  Matrix m(2, 2);
  m << 1, 3, 2, 4;
  EXPECT_EQ(vec(m), (Vector(4) << 1, 2, 3, 4).finished());
  EXPECT_TRUE(vec(Matrix::Zero(3, 2)).isZero());
}

TEST(Vec, UnvecRoundTripAndSizeCheck) {
  std::mt19937_64 rng(1);
  const Matrix m = random_matrix(3, 5, rng);
  EXPECT_EQ(unvec(vec(m), 3, 5), m);
  EXPECT_THROW(unvec(vec(m), 4, 4), Error);
}

TEST(Kron, BlockLayout) {
  Matrix a(2, 2), b(1, 2);
  a << 1, 2, 3, 4;
  b << 5, 6;
  Matrix expect(2, 4);
  expect << 5, 6, 10, 12, 15, 18, 20, 24;
  EXPECT_EQ(kron(a, b), expect);
}

TEST(Kron, TraceIdentityMatchesDirectEvaluation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(3, 3, rng), a1 = random_matrix(3, 3, rng), a2 = random_matrix(3, 3, rng);
    const double direct = (x.transpose() * a1 * x * a2).trace();
    const double via_kron = vec(x).dot(kron(a2.transpose(), a1) * vec(x));
    EXPECT_NEAR(direct, via_kron, 1e-12 * std::max(1.0, std::abs(direct)));
    const Matrix s2 = a2 + a2.transpose();
    EXPECT_NEAR((x.transpose() * a1 * x * s2).trace(), vec(x).dot(kron(s2, a1) * vec(x)),
                1e-12 * std::max(1.0, std::abs(direct)) * 4);
  }
}

TEST(SymEig, IdentityAndTwoByTwo) {
  EXPECT_TRUE(sym_eig(Matrix::Identity(3, 3)).eigenvalues.isApprox(Vector::Ones(3)));
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  const SymEig e = sym_eig(a);
  EXPECT_NEAR(e.eigenvalues(0), 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), std::sqrt(0.5), 1e-14);
}

TEST(SymEig, DescendingAndReconstructs) {
  std::mt19937_64 rng(3);
  const Matrix g = random_matrix(6, 6, rng);
  const Matrix a = g + g.transpose();
  const SymEig e = sym_eig(a);
  for (int i = 1; i < 6; ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
  EXPECT_TRUE((e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose()).isApprox(a, 1e-12));
}

TEST(SymEig, RejectsAsymmetric) {
  Matrix a(2, 2);
  a << 1, 2, 0, 1;
  try {
    sym_eig(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Pinv, InvertibleZeroAndRankOne) {
  Matrix a(2, 2);
  a << 4, 1, 2, 3;
  EXPECT_TRUE(pinv(a).isApprox(a.inverse(), 1e-10));
  EXPECT_TRUE(pinv(Matrix::Zero(3, 2)).isZero());
  EXPECT_EQ(pinv(Matrix::Zero(3, 2)).rows(), 2);
  Vector u(3);
  u << 1, 2, 2;
  u /= 3.0;
  const Matrix p = u * u.transpose();
  EXPECT_TRUE(pinv(p).isApprox(p, 1e-12));
}

TEST(Psd, MinEigenvalueAndCheck) {
  Matrix a(2, 2);
  a << 1, 2, 2, 1;
  EXPECT_NEAR(min_eigenvalue(a), -1.0, 1e-14);
  EXPECT_FALSE(is_psd(a));
  EXPECT_TRUE(is_psd(Matrix::Identity(3, 3)));
}

TEST(SolveKkt, ScalarPin) {
  const KktSolution s = solve_kkt(Matrix::Identity(1, 1), Vector::Zero(1), Matrix::Identity(1, 1), Vector::Constant(1, 2.0));
  EXPECT_NEAR(s.t(0), 2.0, 1e-14);
}

TEST(SolveKkt, SymmetricSplit) {
  const KktSolution s = solve_kkt(Matrix::Identity(2, 2), Vector::Zero(2), Matrix::Ones(1, 2), Vector::Constant(1, 2.0));
  EXPECT_NEAR(s.t(0), 1.0, 1e-12);
  EXPECT_NEAR(s.t(1), 1.0, 1e-12);
  // 2 P t + p + Phi^T lambda = 0
  EXPECT_NEAR(2.0 + s.lambda(0), 0.0, 1e-12);
}

TEST(SolveKkt, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6, m = 2;
    const Matrix g = random_matrix(n, n - 2, rng);
    const Matrix P = g * g.transpose() + 0.1 * Matrix::Identity(n, n);
    const Vector p = random_matrix(n, 1, rng);
    const Matrix phi = random_matrix(m, n, rng);
    const Vector t_feas = random_matrix(n, 1, rng);
    const Vector rhs = phi * t_feas;
    const KktSolution s = solve_kkt(P, p, phi, rhs);
    EXPECT_LT((phi * s.t - rhs).norm(), 1e-9);
    EXPECT_LT((2.0 * P * s.t + p + phi.transpose() * s.lambda).norm(), 1e-9);
    auto obj = [&](const Vector& t) { return t.dot(P * t) + p.dot(t); };
    // Feasible points: t_feas plus null-space directions of phi.
    Eigen::JacobiSVD<Matrix> svd(phi, Eigen::ComputeFullV);
    const Matrix N = svd.matrixV().rightCols(n - m);
    for (int k = 0; k < 100; ++k) {
      const Vector t = t_feas + N * random_matrix(n - m, 1, rng);
      EXPECT_LE(obj(s.t), obj(t) + 1e-9);
    }
  }
}

TEST(SolveKkt, CanonicalPinsWithSingularObjective) {
  // Objective only sees t0; t1 is pinned and t2 is free with zero curvature.
  Matrix P = Matrix::Zero(3, 3);
  P(0, 0) = 1.0;
  Vector p(3);
  p << -2, 0, 0;
  Matrix phi = Matrix::Zero(1, 3);
  phi(0, 1) = 1.0;
  const KktSolution s = solve_kkt(P, p, phi, Vector::Constant(1, 5.0));
  EXPECT_NEAR(s.t(0), 1.0, 1e-12);
  EXPECT_NEAR(s.t(1), 5.0, 1e-12);
  EXPECT_NEAR(s.t(2), 0.0, 1e-12);
}

TEST(SolveKkt, InconsistentConstraints) {
  Matrix phi(2, 2);
  phi << 1, 1, 2, 2;
  Vector rhs(2);
  rhs << 1, 3;
  try {
    solve_kkt(Matrix::Identity(2, 2), Vector::Zero(2), phi, rhs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleConstraints);
  }
}

TEST(CanonicalPinning, OneNonzeroPerRow) {
  Matrix a = Matrix::Zero(2, 3);
  a(0, 1) = 1;
  a(1, 2) = 3;
  EXPECT_TRUE(is_canonical_pinning(a));
  a(1, 0) = 1;
  EXPECT_FALSE(is_canonical_pinning(a));
}

TEST(DuplicationMatrix, MapsVechToVec) {
  const Matrix d = duplication_matrix(3);
  ASSERT_EQ(d.rows(), 9);
  ASSERT_EQ(d.cols(), 6);
  Matrix s(3, 3);
  s << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  Vector vech(6);
  vech << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(d * vech, vec(s));
}
