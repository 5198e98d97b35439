#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

#include "quatmark/real_matrix.hpp"

namespace quatmark {

/// Quaternion w + x i + y j + z k with i^2 = j^2 = k^2 = ijk = -1.
struct Quat {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quat real(double v) noexcept { return {v, 0.0, 0.0, 0.0}; }
  static constexpr Quat unit_i() noexcept { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quat unit_j() noexcept { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quat unit_k() noexcept { return {0.0, 0.0, 0.0, 1.0}; }

  /// Imaginary coefficient by axis: 0 -> i, 1 -> j, 2 -> k.
  constexpr double imag(int axis) const noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& imag(int axis) noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }

  constexpr bool is_real() const noexcept { return x == 0.0 && y == 0.0 && z == 0.0; }
  constexpr bool is_zero() const noexcept { return w == 0.0 && is_real(); }

  friend constexpr bool operator==(const Quat&, const Quat&) = default;
};

constexpr Quat operator+(const Quat& a, const Quat& b) noexcept {
  return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}
constexpr Quat operator-(const Quat& a, const Quat& b) noexcept {
  return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}
constexpr Quat operator-(const Quat& a) noexcept { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quat operator*(double s, const Quat& a) noexcept { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
constexpr Quat operator*(const Quat& a, double s) noexcept { return s * a; }
constexpr Quat operator/(const Quat& a, double s) noexcept { return {a.w / s, a.x / s, a.y / s, a.z / s}; }

/// Hamilton product (noncommutative).
constexpr Quat operator*(const Quat& a, const Quat& b) noexcept {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat& operator+=(Quat& a, const Quat& b) noexcept { return a = a + b; }
inline Quat& operator-=(Quat& a, const Quat& b) noexcept { return a = a - b; }

constexpr Quat quat_mul(const Quat& a, const Quat& b) noexcept { return a * b; }
constexpr Quat quat_conj(const Quat& a) noexcept { return {a.w, -a.x, -a.y, -a.z}; }
constexpr double quat_norm2(const Quat& a) noexcept { return a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z; }
inline double quat_norm(const Quat& a) noexcept { return std::sqrt(quat_norm2(a)); }

/// q^-1 = conj(q) / |q|^2. Throws DomainError for q = 0.
Quat quat_inverse(const Quat& a);

/// Unit quaternion g with g * q real and nonnegative (1 for q = 0).
Quat left_phase(const Quat& q) noexcept;

std::ostream& operator<<(std::ostream& os, const Quat& q);

// Real-scalar cost of the primitive operations, used by the arithmetic counter.
inline constexpr std::size_t kQuatMulFlops = 28;  // 16 mul + 12 add
inline constexpr std::size_t kQuatAddFlops = 4;

/// Dense quaternion matrix stored as four real component planes Q0..Q3.
class QuatMatrix {
 public:
  QuatMatrix() = default;
  QuatMatrix(std::size_t rows, std::size_t cols);
  QuatMatrix(RealMatrix q0, RealMatrix q1, RealMatrix q2, RealMatrix q3);

  static QuatMatrix identity(std::size_t n);
  /// Lifts a real matrix into the real plane.
  static QuatMatrix from_real(const RealMatrix& r);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Quat operator()(std::size_t r, std::size_t c) const noexcept {
    const std::size_t i = r * cols_ + c;
    return {planes_[0].values()[i], planes_[1].values()[i], planes_[2].values()[i], planes_[3].values()[i]};
  }
  void set(std::size_t r, std::size_t c, const Quat& q) noexcept {
    const std::size_t i = r * cols_ + c;
    planes_[0].values()[i] = q.w;
    planes_[1].values()[i] = q.x;
    planes_[2].values()[i] = q.y;
    planes_[3].values()[i] = q.z;
  }

  const RealMatrix& plane(int k) const noexcept { return planes_[static_cast<std::size_t>(k)]; }
  RealMatrix& plane(int k) noexcept { return planes_[static_cast<std::size_t>(k)]; }

  /// True iff every entry of Q0 is exactly zero.
  bool is_pure() const noexcept;

  QuatMatrix transpose() const;
  QuatMatrix conj_transpose() const;
  QuatMatrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;

  friend bool operator==(const QuatMatrix&, const QuatMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::array<RealMatrix, 4> planes_;
};

QuatMatrix operator+(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator-(const QuatMatrix& a, const QuatMatrix& b);
QuatMatrix operator*(double s, const QuatMatrix& a);

/// A * B; throws DimensionError when inner dimensions differ.
QuatMatrix quat_matmul(const QuatMatrix& a, const QuatMatrix& b);

/// Quaternion matrix times real matrix (common when assembling QSVD factors).
QuatMatrix quat_matmul(const QuatMatrix& a, const RealMatrix& b);

/// sqrt of the sum of squares of all 4mn real components.
double frob_norm(const QuatMatrix& q);

/// Block-column / block-row real counterpart:
///   column: [Q0; -Q2; -Q1; -Q3]   (4m x n)
///   row:    [Q0,  Q2,  Q1,  Q3]   (m x 4n)
enum class CompactVariant { kColumn, kRow };

class CompactReal {
 public:
  CompactReal() = default;
  CompactReal(CompactVariant variant, RealMatrix data);

  CompactVariant variant() const noexcept { return variant_; }
  /// Dimensions of the quaternion matrix this encodes.
  std::size_t origin_rows() const noexcept { return origin_rows_; }
  std::size_t origin_cols() const noexcept { return origin_cols_; }

  const RealMatrix& data() const noexcept { return data_; }
  RealMatrix& data() noexcept { return data_; }

  Quat get(std::size_t r, std::size_t c) const noexcept {
    if (variant_ == CompactVariant::kColumn) {
      const std::size_t m = origin_rows_;
      return {data_(r, c), -data_(2 * m + r, c), -data_(m + r, c), -data_(3 * m + r, c)};
    }
    const std::size_t n = origin_cols_;
    return {data_(r, c), data_(r, 2 * n + c), data_(r, n + c), data_(r, 3 * n + c)};
  }
  void set(std::size_t r, std::size_t c, const Quat& q) noexcept {
    if (variant_ == CompactVariant::kColumn) {
      const std::size_t m = origin_rows_;
      data_(r, c) = q.w;
      data_(m + r, c) = -q.y;
      data_(2 * m + r, c) = -q.x;
      data_(3 * m + r, c) = -q.z;
      return;
    }
    const std::size_t n = origin_cols_;
    data_(r, c) = q.w;
    data_(r, n + c) = q.y;
    data_(r, 2 * n + c) = q.x;
    data_(r, 3 * n + c) = q.z;
  }

 private:
  CompactVariant variant_ = CompactVariant::kColumn;
  std::size_t origin_rows_ = 0;
  std::size_t origin_cols_ = 0;
  RealMatrix data_;
};

CompactReal to_compact(const QuatMatrix& q, CompactVariant variant);
/// Inverse of to_compact; bit-identical round trip.
QuatMatrix from_compact(const CompactReal& c);

/// Full 4m x 4n real counterpart
///   [ Q0  Q2  Q1  Q3]
///   [-Q2  Q0  Q3 -Q1]
///   [-Q1 -Q3  Q0  Q2]
///   [-Q3  Q1 -Q2  Q0]
/// Its singular values are those of Q, each repeated four times.
RealMatrix to_full_counterpart(const QuatMatrix& q);

}  // namespace quatmark
