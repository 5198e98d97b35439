#include "quatmark/quaternion.hpp"

#include <array>
#include <cmath>
#include <string>

#include "quatmark/errors.hpp"

namespace quatmark {

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double RealMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  RealMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Quat quat_inverse(const Quat& a) {
  const double n2 = quat_norm2(a);
  if (n2 == 0.0) throw DomainError("quat_inverse: zero quaternion has no inverse");
  return quat_conj(a) / n2;
}

Quat left_phase(const Quat& q) noexcept {
  const double n = quat_norm(q);
  if (n == 0.0) return Quat::real(1.0);
  return quat_conj(q) / n;
}

std::ostream& operator<<(std::ostream& os, const Quat& q) {
  return os << q.w << (q.x < 0 ? " - " : " + ") << std::abs(q.x) << "i" << (q.y < 0 ? " - " : " + ")
            << std::abs(q.y) << "j" << (q.z < 0 ? " - " : " + ") << std::abs(q.z) << "k";
}

QuatMatrix::QuatMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      planes_{RealMatrix(rows, cols), RealMatrix(rows, cols), RealMatrix(rows, cols), RealMatrix(rows, cols)} {}

QuatMatrix::QuatMatrix(RealMatrix q0, RealMatrix q1, RealMatrix q2, RealMatrix q3)
    : rows_(q0.rows()), cols_(q0.cols()), planes_{std::move(q0), std::move(q1), std::move(q2), std::move(q3)} {
  for (const auto& p : planes_)
    if (p.rows() != rows_ || p.cols() != cols_) throw DimensionError("QuatMatrix: component planes differ in shape");
}

QuatMatrix QuatMatrix::identity(std::size_t n) {
  QuatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.planes_[0](i, i) = 1.0;
  return m;
}

QuatMatrix QuatMatrix::from_real(const RealMatrix& r) {
  QuatMatrix m(r.rows(), r.cols());
  m.planes_[0] = r;
  return m;
}

bool QuatMatrix::is_pure() const noexcept {
  for (double v : planes_[0].values())
    if (v != 0.0) return false;
  return true;
}

QuatMatrix QuatMatrix::transpose() const {
  return {planes_[0].transposed(), planes_[1].transposed(), planes_[2].transposed(), planes_[3].transposed()};
}

QuatMatrix QuatMatrix::conj_transpose() const {
  QuatMatrix t = transpose();
  for (int k = 1; k < 4; ++k)
    for (double& v : t.plane(k).values()) v = -v;
  return t;
}

QuatMatrix QuatMatrix::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_) throw DimensionError("QuatMatrix::block: out of range");
  QuatMatrix b(rows, cols);
  for (int k = 0; k < 4; ++k)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) b.plane(k)(r, c) = plane(k)(r0 + r, c0 + c);
  return b;
}

namespace {

void require_same_shape(const QuatMatrix& a, const QuatMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError(std::string(what) + ": shapes differ");
}

}  // namespace

QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b) {
  require_same_shape(a, b, "operator+");
  QuatMatrix out = a;
  for (int k = 0; k < 4; ++k) {
    auto dst = out.plane(k).values();
    auto src = b.plane(k).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return out;
}

QuatMatrix operator-(const QuatMatrix& a, const QuatMatrix& b) {
  require_same_shape(a, b, "operator-");
  QuatMatrix out = a;
  for (int k = 0; k < 4; ++k) {
    auto dst = out.plane(k).values();
    auto src = b.plane(k).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  }
  return out;
}

QuatMatrix operator*(double s, const QuatMatrix& a) {
  QuatMatrix out = a;
  for (int k = 0; k < 4; ++k)
    for (double& v : out.plane(k).values()) v *= s;
  return out;
}

QuatMatrix quat_matmul(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("quat_matmul: inner dimensions differ");
  QuatMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Quat acc;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out.set(i, j, acc);
    }
  return out;
}

QuatMatrix quat_matmul(const QuatMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("quat_matmul: inner dimensions differ");
  return {matmul(a.plane(0), b), matmul(a.plane(1), b), matmul(a.plane(2), b), matmul(a.plane(3), b)};
}

double frob_norm(const QuatMatrix& q) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k)
    for (double v : q.plane(k).values()) s += v * v;
  return std::sqrt(s);
}

CompactReal::CompactReal(CompactVariant variant, RealMatrix data) : variant_(variant), data_(std::move(data)) {
  if (variant_ == CompactVariant::kColumn) {
    if (data_.rows() % 4 != 0) throw FormatError("CompactReal: column variant needs a row count divisible by 4");
    origin_rows_ = data_.rows() / 4;
    origin_cols_ = data_.cols();
  } else {
    if (data_.cols() % 4 != 0) throw FormatError("CompactReal: row variant needs a column count divisible by 4");
    origin_rows_ = data_.rows();
    origin_cols_ = data_.cols() / 4;
  }
}

CompactReal to_compact(const QuatMatrix& q, CompactVariant variant) {
  const std::size_t m = q.rows();
  const std::size_t n = q.cols();
  const bool column = variant == CompactVariant::kColumn;
  CompactReal out(variant, column ? RealMatrix(4 * m, n) : RealMatrix(m, 4 * n));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out.set(r, c, q(r, c));
  return out;
}

QuatMatrix from_compact(const CompactReal& c) {
  QuatMatrix q(c.origin_rows(), c.origin_cols());
  for (std::size_t r = 0; r < q.rows(); ++r)
    for (std::size_t j = 0; j < q.cols(); ++j) q.set(r, j, c.get(r, j));
  return q;
}

RealMatrix to_full_counterpart(const QuatMatrix& q) {
  const std::size_t m = q.rows();
  const std::size_t n = q.cols();
  // layout[br][bc] = {plane, sign}
  static constexpr std::array<std::array<std::array<int, 2>, 4>, 4> kLayout = {{
      {{{0, 1}, {2, 1}, {1, 1}, {3, 1}}},
      {{{2, -1}, {0, 1}, {3, 1}, {1, -1}}},
      {{{1, -1}, {3, -1}, {0, 1}, {2, 1}}},
      {{{3, -1}, {1, 1}, {2, -1}, {0, 1}}},
  }};
  RealMatrix out(4 * m, 4 * n);
  for (std::size_t br = 0; br < 4; ++br) {
    for (std::size_t bc = 0; bc < 4; ++bc) {
      const auto [plane, sign] = kLayout[br][bc];
      const RealMatrix& p = q.plane(plane);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) out(br * m + r, bc * n + c) = sign * p(r, c);
    }
  }
  return out;
}

}  // namespace quatmark
