#include "quatmark/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quatmark/errors.hpp"

namespace quatmark {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double vector_norm(std::span<const Quat> v) {
  double s = 0.0;
  for (const Quat& q : v) s += quat_norm2(q);
  return std::sqrt(s);
}

std::uint64_t pair_units(std::size_t length) { return (length + 1) / 2; }

}  // namespace

QuatMatrix GeneralizedGivens::matrix() const {
  QuatMatrix g(2, 2);
  g.set(0, 0, q11);
  g.set(0, 1, q12);
  g.set(1, 0, q21);
  g.set(1, 1, q22);
  return g;
}

GeneralizedGivens make_givens(const Quat& x1, const Quat& x2, OpLedger* ledger) {
  if (x2.is_zero()) throw PreconditionError("make_givens: x2 must be nonzero");
  const double nrm = std::hypot(quat_norm(x1), quat_norm(x2));
  GeneralizedGivens g;
  g.q11 = x1 / nrm;
  g.q21 = x2 / nrm;
  if (quat_norm(x1) <= quat_norm(x2)) {
    // q12 = |q21|, q22 = -|q12| q21^{-H} q11^H
    g.q12 = Quat::real(quat_norm(g.q21));
    g.q22 = -quat_norm(g.q12) * (quat_inverse(quat_conj(g.q21)) * quat_conj(g.q11));
  } else {
    // q22 = |q11|, q12 = -|q11| q11^{-H} q21^H
    g.q22 = Quat::real(quat_norm(g.q11));
    g.q12 = -quat_norm(g.q11) * (quat_inverse(quat_conj(g.q11)) * quat_conj(g.q21));
  }
  if (ledger) ledger->charge(TransformKind::kGivens, LedgerPhase::kGenerate);
  return g;
}

std::array<Quat, 2> apply_givens_pair(const GeneralizedGivens& g, const std::array<Quat, 2>& x, Side side,
                                      OpLedger* ledger) {
  std::array<Quat, 2> y;
  if (side == Side::kLeft) {
    y[0] = quat_conj(g.q11) * x[0] + quat_conj(g.q21) * x[1];
    y[1] = quat_conj(g.q12) * x[0] + quat_conj(g.q22) * x[1];
  } else {
    y[0] = x[0] * g.q11 + x[1] * g.q21;
    y[1] = x[0] * g.q12 + x[1] * g.q22;
  }
  if (ledger) ledger->charge(TransformKind::kGivens, LedgerPhase::kApply);
  return y;
}

std::vector<Quat> phase_matrix(std::span<const Quat> z) {
  std::vector<Quat> g;
  g.reserve(z.size());
  for (const Quat& q : z) g.push_back(left_phase(q));
  return g;
}

void HouseholderReflector::reflect(std::span<Quat> v) const {
  Quat w;
  for (std::size_t l = 0; l < size_; ++l) w += quat_conj(u_[l]) * v[l];
  w = 2.0 * w;
  for (std::size_t l = 0; l < size_; ++l) v[l] -= u_[l] * w;
}

void HouseholderReflector::reflect_row(std::span<Quat> row) const {
  Quat w;
  for (std::size_t l = 0; l < size_; ++l) w += row[l] * u_[l];
  w = 2.0 * w;
  for (std::size_t l = 0; l < size_; ++l) row[l] -= w * quat_conj(u_[l]);
}

void HouseholderReflector::apply(std::span<Quat> v) const {
  if (v.size() != size_) throw DimensionError("HouseholderReflector::apply: length mismatch");
  if (kind_ == HouseholderKind::kH2)
    for (std::size_t l = 0; l < size_; ++l) v[l] = phases_[l] * v[l];
  if (has_reflection()) reflect(v);
  if (kind_ == HouseholderKind::kH3)
    for (std::size_t l = 0; l < size_; ++l) v[l] = phases_[l] * v[l];
}

void HouseholderReflector::apply_adjoint_right(std::span<Quat> row) const {
  if (row.size() != size_) throw DimensionError("HouseholderReflector::apply_adjoint_right: length mismatch");
  if (kind_ == HouseholderKind::kH2)
    for (std::size_t l = 0; l < size_; ++l) row[l] = row[l] * quat_conj(phases_[l]);
  if (has_reflection()) reflect_row(row);
  if (kind_ == HouseholderKind::kH3)
    for (std::size_t l = 0; l < size_; ++l) row[l] = row[l] * quat_conj(phases_[l]);
}

QuatMatrix HouseholderReflector::matrix() const {
  QuatMatrix t(size_, size_);
  std::vector<Quat> col(size_);
  for (std::size_t c = 0; c < size_; ++c) {
    std::fill(col.begin(), col.end(), Quat{});
    col[c] = Quat::real(1.0);
    apply(col);
    for (std::size_t r = 0; r < size_; ++r) t.set(r, c, col[r]);
  }
  return t;
}

HouseholderReflector make_householder(HouseholderKind kind, std::span<const Quat> y, std::size_t target_axis,
                                      OpLedger* ledger) {
  const std::size_t n = y.size();
  if (n == 0 || target_axis >= n) throw DimensionError("make_householder: target axis out of range");
  const double ynorm = vector_norm(y);
  if (ynorm == 0.0) throw PreconditionError("make_householder: y must be nonzero");

  double tail2 = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    if (l != target_axis) tail2 += quat_norm2(y[l]);
  const bool on_axis = std::sqrt(tail2) <= 16.0 * kEps * ynorm;

  HouseholderReflector h;
  h.kind_ = kind;
  h.size_ = n;
  const Quat& yt = y[target_axis];

  if (kind == HouseholderKind::kH2) {
    h.phases_ = phase_matrix(y);
    if (!on_axis) {
      // Real reflector on the moduli |y_l| sending them to ||y|| e_t.
      std::vector<double> w(n);
      for (std::size_t l = 0; l < n; ++l) w[l] = quat_norm(y[l]);
      const double yt_abs = w[target_axis];
      w[target_axis] = yt_abs > 0.0 ? -tail2 / (yt_abs + ynorm) : -ynorm;
      double wn = 0.0;
      for (double v : w) wn += v * v;
      wn = std::sqrt(wn);
      h.u_.resize(n);
      for (std::size_t l = 0; l < n; ++l) h.u_[l] = Quat::real(w[l] / wn);
    }
  } else {
    Quat alpha = yt;
    if (!on_axis) {
      const double yt_abs = quat_norm(yt);
      const Quat ph = yt_abs > 0.0 ? yt / yt_abs : Quat::real(1.0);
      alpha = -ynorm * ph;
      h.u_.assign(y.begin(), y.end());
      h.u_[target_axis] = yt - alpha;
      const double wn = vector_norm(h.u_);
      for (Quat& q : h.u_) q = q / wn;
    }
    if (kind == HouseholderKind::kH3) {
      h.phases_.assign(n, Quat::real(1.0));
      h.phases_[target_axis] = left_phase(alpha);
    }
  }
  if (ledger) ledger->charge(transform_kind(kind), LedgerPhase::kGenerate);
  return h;
}

void apply_householder(const HouseholderReflector& h, CompactReal& m, const Slice& slice, Side side,
                       OpLedger* ledger) {
  if (slice.row_end > m.origin_rows() || slice.col_end > m.origin_cols() || slice.row_begin > slice.row_end ||
      slice.col_begin > slice.col_end)
    throw DimensionError("apply_householder: slice outside matrix");
  const std::size_t len = side == Side::kLeft ? slice.row_end - slice.row_begin : slice.col_end - slice.col_begin;
  if (len != h.size()) throw DimensionError("apply_householder: slice does not conform to reflector");

  std::vector<Quat> buf(len);
  std::uint64_t vectors = 0;
  if (side == Side::kLeft) {
    for (std::size_t c = slice.col_begin; c < slice.col_end; ++c) {
      for (std::size_t l = 0; l < len; ++l) buf[l] = m.get(slice.row_begin + l, c);
      h.apply(buf);
      for (std::size_t l = 0; l < len; ++l) m.set(slice.row_begin + l, c, buf[l]);
      ++vectors;
    }
  } else {
    for (std::size_t r = slice.row_begin; r < slice.row_end; ++r) {
      for (std::size_t l = 0; l < len; ++l) buf[l] = m.get(r, slice.col_begin + l);
      h.apply_adjoint_right(buf);
      for (std::size_t l = 0; l < len; ++l) m.set(r, slice.col_begin + l, buf[l]);
      ++vectors;
    }
  }
  if (ledger) ledger->charge(transform_kind(h.kind()), LedgerPhase::kApply, vectors * pair_units(len));
}

}  // namespace quatmark
