#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracle.hpp"
#include "quatmark/errors.hpp"
#include "quatmark/qsvd.hpp"
#include "quatmark/rng.hpp"
#include "quatmark/quaternion.hpp"

namespace quatmark {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void expect_quat_near(const Quat& a, const Quat& b, double tol) {
  EXPECT_NEAR(a.w, b.w, tol);
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

Quat random_quat(XorShiftStar& rng) {
  return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
}

TEST(QuatTest, UnitRelations) {
  const Quat i = Quat::unit_i();
  const Quat j = Quat::unit_j();
  const Quat k = Quat::unit_k();
  EXPECT_EQ(i * j, k);
  EXPECT_EQ(j * k, i);
  EXPECT_EQ(k * i, j);
  EXPECT_EQ(j * i, -k);
  EXPECT_EQ(i * i, Quat::real(-1));
  EXPECT_EQ(i * j * k, Quat::real(-1));
}

TEST(QuatTest, ProductMatchesExpansionAndTable) {
  const Quat a{1, 1, 0, 0};
  const Quat b{1, 0, 1, 0};
  EXPECT_EQ(a * b, (Quat{1, 1, 1, 1}));
  EXPECT_EQ(testing::table_mul(a, b), (Quat{1, 1, 1, 1}));
}

TEST(QuatTest, RandomProductsMatchTableOracle) {
  XorShiftStar rng(7);
  for (int t = 0; t < 1000; ++t) {
    const Quat a = random_quat(rng);
    const Quat b = random_quat(rng);
    expect_quat_near(quat_mul(a, b), testing::table_mul(a, b), 8 * kEps);
  }
}

TEST(QuatTest, ConjugateNormInverse) {
  EXPECT_EQ(quat_conj(Quat::unit_i()), -Quat::unit_i());
  EXPECT_DOUBLE_EQ(quat_norm(Quat{3, 4, 0, 0}), 5.0);
  expect_quat_near(quat_inverse(Quat{0, 2, 0, 0}), Quat{0, -0.5, 0, 0}, kEps);
  const Quat q{2, 3, -1, 1};
  expect_quat_near(q * quat_inverse(q), Quat::real(1), 4 * kEps);
  expect_quat_near(quat_inverse(q) * q, Quat::real(1), 4 * kEps);
  EXPECT_THROW(quat_inverse(Quat{}), DomainError);
}

TEST(QuatTest, ConjTimesSelfIsRealNorm) {
  XorShiftStar rng(11);
  for (int t = 0; t < 200; ++t) {
    const Quat q = random_quat(rng);
    const Quat p = quat_conj(q) * q;
    const double n2 = quat_norm2(q);
    EXPECT_NEAR(p.w, n2, 4 * kEps * n2);
    EXPECT_LE(std::abs(p.x) + std::abs(p.y) + std::abs(p.z), 4 * kEps * n2);
  }
}

TEST(QuatTest, LeftPhaseMakesReal) {
  const Quat q{1, -2, 0.5, 3};
  const Quat g = left_phase(q);
  const Quat p = g * q;
  EXPECT_NEAR(quat_norm(g), 1.0, 4 * kEps);
  EXPECT_NEAR(p.w, quat_norm(q), 8 * kEps);
  EXPECT_NEAR(p.x, 0.0, 8 * kEps);
  EXPECT_NEAR(p.y, 0.0, 8 * kEps);
  EXPECT_NEAR(p.z, 0.0, 8 * kEps);
  EXPECT_EQ(left_phase(Quat{}), Quat::real(1));
}

TEST(QuatMatrixTest, PurityAndShape) {
  QuatMatrix q(2, 3);
  EXPECT_TRUE(q.is_pure());
  q.set(1, 2, Quat{0, 1, 2, 3});
  EXPECT_TRUE(q.is_pure());
  q.set(0, 0, Quat{1e-300, 0, 0, 0});
  EXPECT_FALSE(q.is_pure());
  EXPECT_THROW(QuatMatrix(RealMatrix(2, 2), RealMatrix(2, 3), RealMatrix(2, 2), RealMatrix(2, 2)), DimensionError);
}

TEST(QuatMatrixTest, FullCounterpartOfScalars) {
  const RealMatrix one = to_full_counterpart(QuatMatrix::identity(1));
  EXPECT_EQ(one, RealMatrix::identity(4));

  QuatMatrix qi(1, 1);
  qi.set(0, 0, Quat::unit_i());
  const RealMatrix r = to_full_counterpart(qi);
  const double expected[4][4] = {{0, 0, 1, 0}, {0, 0, 0, -1}, {-1, 0, 0, 0}, {0, 1, 0, 0}};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(r(a, b), expected[a][b]) << a << "," << b;
}

TEST(QuatMatrixTest, FullCounterpartIsMultiplicative) {
  const QuatMatrix a = random_quat_matrix(3, 4, 21);
  const QuatMatrix b = random_quat_matrix(4, 2, 22);
  const Eigen::MatrixXd lhs = testing::to_eigen(to_full_counterpart(quat_matmul(a, b)));
  const Eigen::MatrixXd rhs = testing::to_eigen(to_full_counterpart(a)) * testing::to_eigen(to_full_counterpart(b));
  EXPECT_LE(testing::max_abs_diff(lhs, rhs), 64 * kEps);
}

TEST(QuatMatrixTest, FullCounterpartSpectrumHasMultiplicityFour) {
  const QuatMatrix q = random_quat_matrix(2, 3, 5);
  const auto full = testing::singular_values(testing::to_eigen(to_full_counterpart(q)));
  const auto adj = testing::singular_values(testing::complex_adjoint(q));
  ASSERT_EQ(full.size(), 8u);
  for (std::size_t i = 0; i < full.size(); ++i) EXPECT_NEAR(full[i], full[i - i % 4], 1e-12);
  const auto from_full = testing::collapse(full, 4);
  const auto from_adj = testing::collapse(adj, 2);
  const QsvdFactors f = qsvd(q);
  ASSERT_EQ(f.s.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(f.s[i], from_full[i], 1e-12);
    EXPECT_NEAR(f.s[i], from_adj[i], 1e-12);
  }
}

TEST(QuatMatrixTest, CompactLayouts) {
  QuatMatrix q(RealMatrix(2, 2), RealMatrix(2, 2, 1.0), RealMatrix(2, 2), RealMatrix(2, 2));
  const CompactReal col = to_compact(q, CompactVariant::kColumn);
  ASSERT_EQ(col.data().rows(), 8u);
  ASSERT_EQ(col.data().cols(), 2u);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(col.data()(r, c), (r == 4 || r == 5) ? -1.0 : 0.0);

  QuatMatrix qi(1, 1);
  qi.set(0, 0, Quat::unit_i());
  const CompactReal row = to_compact(qi, CompactVariant::kRow);
  ASSERT_EQ(row.data().cols(), 4u);
  EXPECT_EQ(row.data()(0, 0), 0.0);
  EXPECT_EQ(row.data()(0, 1), 0.0);
  EXPECT_EQ(row.data()(0, 2), 1.0);
  EXPECT_EQ(row.data()(0, 3), 0.0);
}

TEST(QuatMatrixTest, CompactFormsAreCounterpartSlices) {
  const QuatMatrix q = random_quat_matrix(3, 2, 8);
  const RealMatrix full = to_full_counterpart(q);
  const CompactReal col = to_compact(q, CompactVariant::kColumn);
  const CompactReal row = to_compact(q, CompactVariant::kRow);
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(col.data()(r, c), full(r, c));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(row.data()(r, c), full(r, c));
}

TEST(QuatMatrixTest, CompactRoundTripIsExact) {
  const QuatMatrix q = random_quat_matrix(5, 7, 3);
  EXPECT_EQ(from_compact(to_compact(q, CompactVariant::kColumn)), q);
  EXPECT_EQ(from_compact(to_compact(q, CompactVariant::kRow)), q);
}

TEST(QuatMatrixTest, Matmul) {
  const QuatMatrix b = random_quat_matrix(3, 3, 1);
  EXPECT_EQ(quat_matmul(QuatMatrix::identity(3), b), b);

  QuatMatrix i(1, 1), j(1, 1);
  i.set(0, 0, Quat::unit_i());
  j.set(0, 0, Quat::unit_j());
  EXPECT_EQ(quat_matmul(i, j)(0, 0), Quat::unit_k());

  const QuatMatrix a = random_quat_matrix(3, 3, 2);
  const Eigen::MatrixXd lhs = testing::to_eigen(to_full_counterpart(quat_matmul(a, b)));
  const Eigen::MatrixXd rhs = testing::to_eigen(to_full_counterpart(a)) * testing::to_eigen(to_full_counterpart(b));
  EXPECT_LE(testing::max_abs_diff(lhs, rhs), 64 * kEps);

  EXPECT_THROW(quat_matmul(random_quat_matrix(2, 3, 1), random_quat_matrix(2, 3, 1)), DimensionError);
}

TEST(QuatMatrixTest, FrobeniusNorm) {
  EXPECT_EQ(frob_norm(QuatMatrix(3, 2)), 0.0);
  QuatMatrix q(1, 1);
  q.set(0, 0, Quat{3, 4, 0, 0});
  EXPECT_DOUBLE_EQ(frob_norm(q), 5.0);
  const QuatMatrix r = random_quat_matrix(4, 6, 9);
  EXPECT_NEAR(frob_norm(r), 0.5 * testing::to_eigen(to_full_counterpart(r)).norm(), 1e-13);
}

}  // namespace
}  // namespace quatmark
