#include "quatmark/qsvd.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "quatmark/errors.hpp"
#include "quatmark/transforms.hpp"

namespace quatmark {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Real arithmetic per length-L vector for an H3 application (rank-one
// update plus the single nontrivial phase), per Givens pair, per phase entry.
constexpr std::uint64_t householder_arith(std::size_t len) { return 64 * len + 32; }
constexpr std::uint64_t kGivensPairArith = 120;
constexpr std::uint64_t kPhaseArith = kQuatMulFlops;

class Reducer {
 public:
  Reducer(const QuatMatrix& q, OpLedger* ledger, const BidiagOptions& options)
      : m_(q.rows()),
        n_(q.cols()),
        c_(to_compact(q, CompactVariant::kColumn)),
        u_(to_compact(QuatMatrix::identity(q.rows()), CompactVariant::kRow)),
        v_(to_compact(QuatMatrix::identity(q.cols()), CompactVariant::kColumn)),
        ledger_(ledger),
        options_(options) {}

  BidiagResult run() {
    for (std::size_t s = 0; s + 2 < n_; ++s) {
      left_householder(s);
      if (s + 3 == n_ && options_.use_givens)
        right_givens(s);
      else
        right_householder(s);
    }
    if (n_ >= 2) {
      const std::size_t s = n_ - 2;
      if (m_ == n_ && options_.use_givens)
        left_givens(s);
      else
        left_householder(s);
      right_phase(s, s + 1);
    }
    const std::size_t s = n_ - 1;
    if (m_ == n_)
      left_phase(s);
    else
      left_householder(s);

    BidiagResult out;
    out.b = RealMatrix(m_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out.b(i, i) = c_.get(i, i).w;
      if (i + 1 < n_) out.b(i, i + 1) = c_.get(i, i + 1).w;
    }
    out.u_acc = std::move(u_);
    out.v_acc = std::move(v_);
    out.givens_substitutions = givens_;
    return out;
  }

 private:
  void skip() {
    if (ledger_) ledger_->record_skip();
  }

  void arith(std::uint64_t n) {
    if (ledger_) ledger_->add_arith_flops(n);
  }

  // Column s, rows s..m-1 -> ||y|| e_s.
  void left_householder(std::size_t s) {
    std::vector<Quat> y(m_ - s);
    double tail2 = 0.0;
    for (std::size_t l = 0; l < y.size(); ++l) {
      y[l] = c_.get(s + l, s);
      if (l > 0) tail2 += quat_norm2(y[l]);
    }
    const double ynorm = std::sqrt(tail2 + quat_norm2(y[0]));
    if (ynorm == 0.0 || std::sqrt(tail2) <= 16.0 * kEps * ynorm) {
      skip();
      for (std::size_t l = 1; l < y.size(); ++l) c_.set(s + l, s, Quat{});
      if (!y[0].is_real()) left_phase(s);
      return;
    }
    const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0, ledger_);
    apply_householder(h, c_, {s, m_, s, n_}, Side::kLeft, ledger_);
    arith((n_ - s) * householder_arith(y.size()));
    apply_householder(h, u_, {0, m_, s, m_}, Side::kRight, ledger_);
    c_.set(s, s, Quat::real(ynorm));
    for (std::size_t l = 1; l < y.size(); ++l) c_.set(s + l, s, Quat{});
  }

  // Row s, columns s+1..n-1 -> ||y|| e_{s+1}^T.
  void right_householder(std::size_t s) {
    std::vector<Quat> y(n_ - s - 1);
    double tail2 = 0.0;
    for (std::size_t l = 0; l < y.size(); ++l) {
      y[l] = quat_conj(c_.get(s, s + 1 + l));
      if (l > 0) tail2 += quat_norm2(y[l]);
    }
    const double ynorm = std::sqrt(tail2 + quat_norm2(y[0]));
    if (ynorm == 0.0 || std::sqrt(tail2) <= 16.0 * kEps * ynorm) {
      skip();
      for (std::size_t l = 1; l < y.size(); ++l) c_.set(s, s + 1 + l, Quat{});
      if (!y[0].is_real()) right_phase(s, s + 1);
      return;
    }
    const HouseholderReflector h = make_householder(HouseholderKind::kH3, y, 0, ledger_);
    apply_householder(h, c_, {s, m_, s + 1, n_}, Side::kRight, ledger_);
    arith((m_ - s) * householder_arith(y.size()));
    apply_householder(h, v_, {0, n_, s + 1, n_}, Side::kRight, ledger_);
    c_.set(s, s + 1, Quat::real(ynorm));
    for (std::size_t l = 1; l < y.size(); ++l) c_.set(s, s + 1 + l, Quat{});
  }

  // Rows s, s+1 of column s (square case, s = n-2).
  void left_givens(std::size_t s) {
    const Quat x1 = c_.get(s, s);
    const Quat x2 = c_.get(s + 1, s);
    if (x2.is_zero()) {
      skip();
      if (!x1.is_real()) left_phase(s);
      return;
    }
    const GeneralizedGivens g = make_givens(x1, x2, ledger_);
    for (std::size_t col = s; col < n_; ++col) {
      const auto p = apply_givens_pair(g, {c_.get(s, col), c_.get(s + 1, col)}, Side::kLeft, ledger_);
      c_.set(s, col, p[0]);
      c_.set(s + 1, col, p[1]);
      arith(kGivensPairArith);
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const auto p = apply_givens_pair(g, {u_.get(r, s), u_.get(r, s + 1)}, Side::kRight, ledger_);
      u_.set(r, s, p[0]);
      u_.set(r, s + 1, p[1]);
    }
    c_.set(s, s, Quat::real(std::hypot(quat_norm(x1), quat_norm(x2))));
    c_.set(s + 1, s, Quat{});
    ++givens_;
  }

  // Row s, columns n-2, n-1 (s = n-3).
  void right_givens(std::size_t s) {
    const std::size_t a = s + 1;
    const std::size_t b = s + 2;
    const Quat x1 = quat_conj(c_.get(s, a));
    const Quat x2 = quat_conj(c_.get(s, b));
    if (x2.is_zero()) {
      skip();
      if (!x1.is_real()) right_phase(s, a);
      return;
    }
    const GeneralizedGivens g = make_givens(x1, x2, ledger_);
    for (std::size_t r = s; r < m_; ++r) {
      const auto p = apply_givens_pair(g, {c_.get(r, a), c_.get(r, b)}, Side::kRight, ledger_);
      c_.set(r, a, p[0]);
      c_.set(r, b, p[1]);
      arith(kGivensPairArith);
    }
    for (std::size_t r = 0; r < n_; ++r) {
      const auto p = apply_givens_pair(g, {v_.get(r, a), v_.get(r, b)}, Side::kRight, ledger_);
      v_.set(r, a, p[0]);
      v_.set(r, b, p[1]);
    }
    c_.set(s, a, Quat::real(std::hypot(quat_norm(x1), quat_norm(x2))));
    c_.set(s, b, Quat{});
    ++givens_;
  }

  // Row r <- g * row r so that C(r, r) becomes real and nonnegative.
  void left_phase(std::size_t r) {
    const Quat e = c_.get(r, r);
    if (e.is_real()) return;
    const Quat g = quatmark::left_phase(e);
    for (std::size_t col = r; col < n_; ++col) c_.set(r, col, g * c_.get(r, col));
    const Quat gc = quat_conj(g);
    for (std::size_t i = 0; i < m_; ++i) u_.set(i, r, u_.get(i, r) * gc);
    c_.set(r, r, Quat::real(quat_norm(e)));
    charge_phase(n_ - r + m_);
    arith((n_ - r) * kPhaseArith);
  }

  // Column c <- column c * g so that C(r, c) becomes real and nonnegative.
  void right_phase(std::size_t r, std::size_t c) {
    const Quat e = c_.get(r, c);
    if (e.is_real()) return;
    const Quat g = quatmark::left_phase(e);
    for (std::size_t i = r; i < m_; ++i) c_.set(i, c, c_.get(i, c) * g);
    for (std::size_t i = 0; i < n_; ++i) v_.set(i, c, v_.get(i, c) * g);
    c_.set(r, c, Quat::real(quat_norm(e)));
    charge_phase(m_ - r + n_);
    arith((m_ - r) * kPhaseArith);
  }

  void charge_phase(std::uint64_t entries) {
    if (!ledger_) return;
    ledger_->charge(TransformKind::kPhase, LedgerPhase::kGenerate);
    ledger_->charge(TransformKind::kPhase, LedgerPhase::kApply, entries);
  }

  std::size_t m_;
  std::size_t n_;
  CompactReal c_;
  CompactReal u_;
  CompactReal v_;
  OpLedger* ledger_;
  BidiagOptions options_;
  std::size_t givens_ = 0;
};

// Right-multiplies column j of `primary` (and of `partner`, when j is in range)
// by the unit quaternion that makes the first clearly nonzero entry of
// primary's column j real and positive.
void normalize_column_phases(QuatMatrix& primary, QuatMatrix* partner, std::size_t shared) {
  for (std::size_t j = 0; j < primary.cols(); ++j) {
    Quat pivot;
    for (std::size_t r = 0; r < primary.rows(); ++r) {
      const Quat q = primary(r, j);
      if (quat_norm(q) > 1e-10) {
        pivot = q;
        break;
      }
    }
    if (pivot.is_zero()) continue;
    const Quat p = quatmark::left_phase(pivot);
    for (std::size_t r = 0; r < primary.rows(); ++r) primary.set(r, j, primary(r, j) * p);
    if (partner && j < shared)
      for (std::size_t r = 0; r < partner->rows(); ++r) partner->set(r, j, (*partner)(r, j) * p);
  }
}

QsvdFactors qsvd_tall(const QuatMatrix& q, OpLedger* ledger, const BidiagOptions& options) {
  BidiagResult bd = bidiagonalize(q, ledger, options);
  RealSvd svd = real_bidiagonal_svd(bd.b);
  QsvdFactors f;
  f.u = quat_matmul(from_compact(bd.u_acc), svd.u);
  f.v = quat_matmul(from_compact(bd.v_acc), svd.v);
  f.s = std::move(svd.d);
  return f;
}

}  // namespace

BidiagResult bidiagonalize(const QuatMatrix& q, OpLedger* ledger, const BidiagOptions& options) {
  if (q.empty()) throw FormatError("bidiagonalize: empty matrix");
  if (q.rows() < q.cols()) throw DimensionError("bidiagonalize: expects rows >= cols");
  return Reducer(q, ledger, options).run();
}

QsvdFactors qsvd(const QuatMatrix& q, OpLedger* ledger, const BidiagOptions& options) {
  if (q.empty()) throw FormatError("qsvd: empty matrix");
  QsvdFactors f;
  if (q.rows() >= q.cols()) {
    f = qsvd_tall(q, ledger, options);
  } else {
    f = qsvd_tall(q.conj_transpose(), ledger, options);
    std::swap(f.u, f.v);
  }
  normalize_column_phases(f.v, &f.u, f.s.size());
  if (f.u.cols() > f.s.size()) {
    QuatMatrix tail = f.u.block(0, f.s.size(), f.u.rows(), f.u.cols() - f.s.size());
    normalize_column_phases(tail, nullptr, 0);
    for (std::size_t r = 0; r < tail.rows(); ++r)
      for (std::size_t j = 0; j < tail.cols(); ++j) f.u.set(r, f.s.size() + j, tail(r, j));
  }
  return f;
}

QuatMatrix reconstruct(const QsvdFactors& f) {
  const std::size_t k = f.s.size();
  if (f.u.cols() < k || f.v.cols() < k) throw DimensionError("reconstruct: factors do not conform");
  QuatMatrix us = f.u.block(0, 0, f.u.rows(), k);
  for (std::size_t r = 0; r < us.rows(); ++r)
    for (std::size_t j = 0; j < k; ++j) us.set(r, j, us(r, j) * f.s[j]);
  return quat_matmul(us, f.v.block(0, 0, f.v.rows(), k).conj_transpose());
}

double residual(const QuatMatrix& q, const QsvdFactors& f) {
  const QuatMatrix r = reconstruct(f);
  if (r.rows() != q.rows() || r.cols() != q.cols()) throw DimensionError("residual: factors do not match Q");
  return frob_norm(q - r);
}

double unitarity_error(const QuatMatrix& m) {
  return frob_norm(quat_matmul(m.conj_transpose(), m) - QuatMatrix::identity(m.cols()));
}

}  // namespace quatmark
