#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracle.hpp"
#include "quatmark/errors.hpp"
#include "quatmark/op_ledger.hpp"
#include "quatmark/qsvd.hpp"
#include "quatmark/rng.hpp"
#include "quatmark/transforms.hpp"

namespace quatmark {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Quat random_quat(XorShiftStar& rng) {
  return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
}

std::vector<Quat> random_vector(std::size_t n, std::uint64_t seed) {
  XorShiftStar rng(seed);
  std::vector<Quat> v(n);
  for (auto& q : v) q = random_quat(rng);
  return v;
}

double vector_norm(const std::vector<Quat>& v) {
  double s = 0.0;
  for (const auto& q : v) s += quat_norm2(q);
  return std::sqrt(s);
}

double quat_dist(const Quat& a, const Quat& b) { return quat_norm(a - b); }

TEST(GivensTest, UnitVectorPair) {
  const GeneralizedGivens g = make_givens(Quat{}, Quat::real(1));
  EXPECT_EQ(g.q11, Quat{});
  EXPECT_EQ(g.q21, Quat::real(1));
  const auto y = apply_givens_pair(g, {Quat{}, Quat::real(1)}, Side::kLeft);
  EXPECT_LE(quat_dist(y[0], Quat::real(1)), 32 * kEps);
  EXPECT_LE(quat_norm(y[1]), 32 * kEps);
}

TEST(GivensTest, RealPair) {
  const GeneralizedGivens g = make_givens(Quat::real(3), Quat::real(4));
  EXPECT_LE(quat_dist(g.q11, Quat::real(0.6)), 4 * kEps);
  EXPECT_LE(quat_dist(g.q21, Quat::real(0.8)), 4 * kEps);
  const auto y = apply_givens_pair(g, {Quat::real(3), Quat::real(4)}, Side::kLeft);
  EXPECT_LE(quat_dist(y[0], Quat::real(5)), 32 * kEps * 5);
  EXPECT_LE(quat_norm(y[1]), 32 * kEps * 5);
  const QuatMatrix gm = g.matrix();
  EXPECT_LE(unitarity_error(gm), 32 * kEps);
}

TEST(GivensTest, RandomPairsAreUnitaryAndAnnihilate) {
  XorShiftStar rng(3);
  for (int t = 0; t < 500; ++t) {
    const Quat x1 = random_quat(rng);
    const Quat x2 = t % 2 == 0 ? random_quat(rng) : 1e3 * random_quat(rng);
    const GeneralizedGivens g = make_givens(x1, x2);
    EXPECT_LE(unitarity_error(g.matrix()), 32 * kEps);
    const double n = std::sqrt(quat_norm2(x1) + quat_norm2(x2));
    const auto y = apply_givens_pair(g, {x1, x2}, Side::kLeft);
    EXPECT_LE(quat_dist(y[0], Quat::real(n)), 32 * kEps * n);
    EXPECT_LE(quat_norm(y[1]), 32 * kEps * n);
  }
}

TEST(GivensTest, RightApplicationMatchesMatrixProduct) {
  const GeneralizedGivens g = make_givens(Quat{1, 2, -1, 0.5}, Quat{0, 1, 3, -2});
  const Quat a{0.3, -0.2, 0.1, 0.9};
  const Quat b{-1, 0.4, 0.2, 0.0};
  QuatMatrix row(1, 2);
  row.set(0, 0, a);
  row.set(0, 1, b);
  const QuatMatrix ref = quat_matmul(row, g.matrix());
  const auto y = apply_givens_pair(g, {a, b}, Side::kRight);
  EXPECT_LE(quat_dist(y[0], ref(0, 0)), 16 * kEps);
  EXPECT_LE(quat_dist(y[1], ref(0, 1)), 16 * kEps);
}

TEST(GivensTest, IdentityLeavesVectorUnchanged) {
  const GeneralizedGivens g;
  const std::array<Quat, 2> x = {Quat{1, 2, 3, 4}, Quat{-1, 0, 2, 5}};
  EXPECT_EQ(apply_givens_pair(g, x, Side::kLeft), x);
}

TEST(GivensTest, RejectsZeroSecondEntry) {
  EXPECT_THROW(make_givens(Quat::real(1), Quat{}), PreconditionError);
}

TEST(GivensTest, LedgerMatchesCostTable) {
  OpLedger ledger;
  const GeneralizedGivens g = make_givens(Quat{1, 2, 3, 4}, Quat{4, 3, 2, 1}, &ledger);
  EXPECT_EQ(ledger.tally(TransformKind::kGivens, LedgerPhase::kGenerate).assignments, 9u);
  EXPECT_EQ(ledger.tally(TransformKind::kGivens, LedgerPhase::kGenerate).flops, 69u);
  apply_givens_pair(g, {Quat{1, 0, 0, 0}, Quat{0, 1, 0, 0}}, Side::kLeft, &ledger);
  EXPECT_EQ(ledger.tally(TransformKind::kGivens, LedgerPhase::kApply).assignments, 2u);
  EXPECT_EQ(ledger.tally(TransformKind::kGivens, LedgerPhase::kApply).flops, 120u);
}

TEST(PhaseMatrixTest, Examples) {
  const std::vector<Quat> zi = {Quat::unit_i()};
  const auto gi = phase_matrix(zi);
  ASSERT_EQ(gi.size(), 1u);
  EXPECT_EQ(gi[0], -Quat::unit_i());
  EXPECT_EQ(gi[0] * zi[0], Quat::real(1));

  const std::vector<Quat> z0 = {Quat{}};
  EXPECT_EQ(phase_matrix(z0)[0], Quat::real(1));
}

TEST(PhaseMatrixTest, RandomEntriesBecomeRealNonnegative) {
  const auto z = random_vector(64, 17);
  const auto g = phase_matrix(z);
  for (std::size_t l = 0; l < z.size(); ++l) {
    const double n = quat_norm(z[l]);
    EXPECT_LE(quat_dist(g[l] * z[l], Quat::real(n)), 8 * kEps * n);
  }
}

TEST(HouseholderTest, AlreadyOnAxisIsIdentity) {
  const std::vector<Quat> y = {Quat::real(5), Quat{}, Quat{}};
  for (auto kind : {HouseholderKind::kH1, HouseholderKind::kH2, HouseholderKind::kH3}) {
    const HouseholderReflector h = make_householder(kind, y, 0);
    EXPECT_FALSE(h.has_reflection());
    std::vector<Quat> v = y;
    h.apply(v);
    EXPECT_LE(quat_dist(v[0], Quat::real(5)), 8 * kEps);
    EXPECT_EQ(v[1], Quat{});
    EXPECT_EQ(v[2], Quat{});
  }
}

TEST(HouseholderTest, H3MapsPairToRealAxis) {
  const std::vector<Quat> y = {Quat{0, 3, 0, 0}, Quat::real(4)};
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0);
  const QuatMatrix t = h.matrix();
  EXPECT_LE(unitarity_error(t), 64 * kEps * 2);
  QuatMatrix col(2, 1);
  col.set(0, 0, y[0]);
  col.set(1, 0, y[1]);
  const QuatMatrix ty = quat_matmul(t, col);
  EXPECT_LE(quat_dist(ty(0, 0), Quat::real(5)), 64 * kEps * 5);
  EXPECT_LE(quat_norm(ty(1, 0)), 64 * kEps * 5);

  std::vector<Quat> v = y;
  h.apply(v);
  EXPECT_LE(quat_dist(v[0], Quat::real(5)), 64 * kEps * 5);
  EXPECT_LE(quat_norm(v[1]), 64 * kEps * 5);
}

TEST(HouseholderTest, AllKindsUnitaryAndAnnihilating) {
  for (auto kind : {HouseholderKind::kH1, HouseholderKind::kH2, HouseholderKind::kH3}) {
    for (std::size_t n : {2u, 3u, 5u, 8u}) {
      for (std::size_t target = 0; target < n; target += n - 1) {
        const auto y = random_vector(n, 100 * n + target);
        const double norm = vector_norm(y);
        const HouseholderReflector h = make_householder(kind, y, target);
        if (h.has_reflection()) {
          double un = 0.0;
          for (const auto& q : h.u()) un += quat_norm2(q);
          EXPECT_NEAR(std::sqrt(un), 1.0, 8 * kEps);
        }
        EXPECT_LE(unitarity_error(h.matrix()), 64 * kEps * static_cast<double>(n));
        std::vector<Quat> v = y;
        h.apply(v);
        for (std::size_t l = 0; l < n; ++l) {
          if (l == target) continue;
          EXPECT_LE(quat_norm(v[l]), 64 * kEps * norm);
        }
        EXPECT_NEAR(quat_norm(v[target]), norm, 64 * kEps * norm);
        if (kind != HouseholderKind::kH1) {
          EXPECT_NEAR(v[target].w, norm, 64 * kEps * norm);
        }
      }
    }
  }
}

TEST(HouseholderTest, LedgerMatchesCostTable) {
  OpLedger ledger;
  const auto y = random_vector(2, 5);
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0, &ledger);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kGenerate).assignments, 11u);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kGenerate).flops, 46u);

  QuatMatrix m(2, 1);
  m.set(0, 0, y[0]);
  m.set(1, 0, y[1]);
  CompactReal c = to_compact(m, CompactVariant::kColumn);
  apply_householder(h, c, Slice{0, 2, 0, 1}, Side::kLeft, &ledger);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kApply).assignments, 4u);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kApply).flops, 184u);
}

TEST(HouseholderTest, SubstitutionSavingMatchesCostTable) {
  const auto h3g = calibrated_cost(TransformKind::kHouseholder3, LedgerPhase::kGenerate);
  const auto h3a = calibrated_cost(TransformKind::kHouseholder3, LedgerPhase::kApply);
  const auto gg = calibrated_cost(TransformKind::kGivens, LedgerPhase::kGenerate);
  const auto ga = calibrated_cost(TransformKind::kGivens, LedgerPhase::kApply);
  EXPECT_EQ((h3g.assignments + h3a.assignments) - (gg.assignments + ga.assignments), 4u);
  EXPECT_EQ((h3g.flops + h3a.flops) - (gg.flops + ga.flops), 41u);
}

TEST(HouseholderTest, IdentityReflectorStillCharges) {
  OpLedger ledger;
  const std::vector<Quat> y = {Quat::real(2), Quat{}};
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0, &ledger);
  const QuatMatrix m = random_quat_matrix(2, 3, 4);
  CompactReal c = to_compact(m, CompactVariant::kColumn);
  apply_householder(h, c, Slice{0, 2, 0, 3}, Side::kLeft, &ledger);
  EXPECT_EQ(from_compact(c), m);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kApply).events, 3u);
  EXPECT_EQ(ledger.tally(TransformKind::kHouseholder3, LedgerPhase::kApply).flops, 3u * 184u);
}

TEST(HouseholderTest, CompactApplicationAnnihilatesOwnColumn) {
  const QuatMatrix m = random_quat_matrix(5, 3, 12);
  std::vector<Quat> y(4);
  for (std::size_t l = 0; l < 4; ++l) y[l] = m(1 + l, 0);
  const double norm = vector_norm(y);
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0);
  CompactReal c = to_compact(m, CompactVariant::kColumn);
  apply_householder(h, c, Slice{1, 5, 0, 3}, Side::kLeft);
  const QuatMatrix out = from_compact(c);
  EXPECT_EQ(out(0, 0), m(0, 0));
  EXPECT_NEAR(out(1, 0).w, norm, 64 * kEps * norm);
  for (std::size_t r = 2; r < 5; ++r) EXPECT_LE(quat_norm(out(r, 0)), 64 * kEps * norm);
  EXPECT_NEAR(frob_norm(out), frob_norm(m), 64 * kEps * frob_norm(m));
}

TEST(HouseholderTest, RightApplicationAnnihilatesRow) {
  const QuatMatrix m = random_quat_matrix(2, 4, 13);
  std::vector<Quat> yconj(4);
  for (std::size_t l = 0; l < 4; ++l) yconj[l] = quat_conj(m(0, l));
  const double norm = vector_norm(yconj);
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, yconj, 0);
  CompactReal c = to_compact(m, CompactVariant::kRow);
  apply_householder(h, c, Slice{0, 2, 0, 4}, Side::kRight);
  const QuatMatrix out = from_compact(c);
  EXPECT_NEAR(out(0, 0).w, norm, 64 * kEps * norm);
  for (std::size_t l = 1; l < 4; ++l) EXPECT_LE(quat_norm(out(0, l)), 64 * kEps * norm);
}

TEST(HouseholderTest, RejectsBadInput) {
  const std::vector<Quat> zero = {Quat{}, Quat{}};
  EXPECT_THROW(make_householder(HouseholderKind::kH3, zero, 0), PreconditionError);
  const auto y = random_vector(3, 1);
  const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0);
  CompactReal c = to_compact(random_quat_matrix(4, 4, 1), CompactVariant::kColumn);
  EXPECT_THROW(apply_householder(h, c, Slice{0, 2, 0, 4}, Side::kLeft), DimensionError);
  EXPECT_THROW(apply_householder(h, c, Slice{2, 5, 0, 4}, Side::kLeft), DimensionError);
}

TEST(OpLedgerTest, CountersAccumulateAndReset) {
  OpLedger a;
  a.charge(TransformKind::kGivens, LedgerPhase::kGenerate);
  a.charge(TransformKind::kGivens, LedgerPhase::kGenerate);
  EXPECT_EQ(a.tally(TransformKind::kGivens, LedgerPhase::kGenerate).events, 2u);
  EXPECT_EQ(a.total_flops(), 138u);
  OpLedger b;
  b.charge(TransformKind::kHouseholder3, LedgerPhase::kApply, 3);
  a.merge(b);
  EXPECT_EQ(a.total_flops(), 138u + 3u * 184u);
  EXPECT_EQ(a.total_assignments(), 18u + 12u);
  EXPECT_NE(a.report().find("givens"), std::string::npos);
  a.reset();
  EXPECT_EQ(a, OpLedger{});
}

}  // namespace
}  // namespace quatmark
