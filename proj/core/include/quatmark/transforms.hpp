#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "quatmark/op_ledger.hpp"
#include "quatmark/quaternion.hpp"

namespace quatmark {

enum class Side : std::uint8_t { kLeft, kRight };

/// 2x2 quaternion unitary [q11 q12; q21 q22] with G^H x = [||x||, 0]^T for
/// the vector it was built from.
struct GeneralizedGivens {
  Quat q11 = Quat::real(1.0);
  Quat q12;
  Quat q21;
  Quat q22 = Quat::real(1.0);

  QuatMatrix matrix() const;
};

/// q11 = x1/||x||, q21 = x2/||x||; the second column follows the
/// |x1| <= |x2| / |x1| > |x2| case split. Requires x2 != 0
/// (PreconditionError otherwise; the caller skips the rotation).
GeneralizedGivens make_givens(const Quat& x1, const Quat& x2, OpLedger* ledger = nullptr);

/// Left: returns G^H x. Right: treats x as a row pair and returns x G.
std::array<Quat, 2> apply_givens_pair(const GeneralizedGivens& g, const std::array<Quat, 2>& x, Side side,
                                      OpLedger* ledger = nullptr);

/// g_l = conj(z_l)/|z_l|, or 1 where z_l = 0. Each g_l z_l is real and >= 0.
std::vector<Quat> phase_matrix(std::span<const Quat> z);

enum class HouseholderKind : std::uint8_t { kH1, kH2, kH3 };

constexpr TransformKind transform_kind(HouseholderKind k) noexcept {
  switch (k) {
    case HouseholderKind::kH1: return TransformKind::kHouseholder1;
    case HouseholderKind::kH2: return TransformKind::kHouseholder2;
    case HouseholderKind::kH3: return TransformKind::kHouseholder3;
  }
  return TransformKind::kHouseholder3;
}

/// Quaternion Householder-type unitary T of order n.
///   H1: T = I - 2 u u^H
///   H2: T = (I - 2 u u^T) G, u real
///   H3: T = G (I - 2 u u^H)
/// An empty `u` means the rank-one part is the identity.
class HouseholderReflector {
 public:
  HouseholderKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return size_; }
  bool has_reflection() const noexcept { return !u_.empty(); }
  std::span<const Quat> u() const noexcept { return u_; }
  /// Diagonal of G (empty for H1).
  std::span<const Quat> phases() const noexcept { return phases_; }

  /// v <- T v
  void apply(std::span<Quat> v) const;
  /// row <- row T^H
  void apply_adjoint_right(std::span<Quat> row) const;

  QuatMatrix matrix() const;

 private:
  friend HouseholderReflector make_householder(HouseholderKind, std::span<const Quat>, std::size_t, OpLedger*);

  void reflect(std::span<Quat> v) const;          // v - 2 u (u^H v)
  void reflect_row(std::span<Quat> row) const;    // row - 2 (row u) u^H

  HouseholderKind kind_ = HouseholderKind::kH3;
  std::size_t size_ = 0;
  std::vector<Quat> u_;
  std::vector<Quat> phases_;
};

/// Builds a reflector that sends y to a multiple of the axis e_t.
/// H2 and H3 produce ||y|| e_t exactly (real, nonnegative). H1 produces
/// alpha e_t with alpha = -phase(y_t) ||y||. When y already lies on the
/// axis (tail below 16 eps ||y||) the rank-one part is the identity and only
/// the generate cost is charged. Requires ||y|| > 0.
HouseholderReflector make_householder(HouseholderKind kind, std::span<const Quat> y, std::size_t target_axis,
                                      OpLedger* ledger = nullptr);

/// Half-open index window into the quaternion matrix encoded by a CompactReal.
struct Slice {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
};

/// In-place application on compact storage. Left: every column of the slice
/// (length == h.size()) becomes T x. Right: every row becomes x T^H.
/// Charges ceil(size/2) apply units per vector.
void apply_householder(const HouseholderReflector& h, CompactReal& m, const Slice& slice, Side side,
                       OpLedger* ledger = nullptr);

}  // namespace quatmark
