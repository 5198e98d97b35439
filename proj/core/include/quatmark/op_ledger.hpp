#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace quatmark {

enum class TransformKind : std::uint8_t { kHouseholder1, kHouseholder2, kHouseholder3, kGivens, kPhase };
enum class LedgerPhase : std::uint8_t { kGenerate, kApply };

inline constexpr std::size_t kTransformKindCount = 5;

struct CalibratedCost {
  std::uint64_t assignments = 0;
  std::uint64_t flops = 0;
};

/// Per-unit costs. The H3 and Givens rows are the published calibration
/// (generate once; apply per pair of quaternions). H1, H2 and the phase
/// matrix have no calibrated row and are tracked as event counts only.
constexpr CalibratedCost calibrated_cost(TransformKind kind, LedgerPhase phase) noexcept {
  switch (kind) {
    case TransformKind::kHouseholder3:
      return phase == LedgerPhase::kGenerate ? CalibratedCost{11, 46} : CalibratedCost{4, 184};
    case TransformKind::kGivens:
      return phase == LedgerPhase::kGenerate ? CalibratedCost{9, 69} : CalibratedCost{2, 120};
    default:
      return {};
  }
}

std::string_view to_string(TransformKind kind) noexcept;
std::string_view to_string(LedgerPhase phase) noexcept;

/// Accumulates calibrated operation counts per transform kind.
///
/// Counters only grow; `reset` is the sole way back to zero. A ledger is
/// not synchronized: give each thread its own and `merge` afterwards.
class OpLedger {
 public:
  struct Tally {
    std::uint64_t events = 0;
    std::uint64_t assignments = 0;
    std::uint64_t flops = 0;
    friend bool operator==(const Tally&, const Tally&) = default;
  };

  /// Charges `units` calibration units of (kind, phase).
  void charge(TransformKind kind, LedgerPhase phase, std::uint64_t units = 1) noexcept;
  /// A transform that was not needed (column already reduced).
  void record_skip() noexcept { ++skips_; }
  /// Real arithmetic actually performed on the working matrix during
  /// bidiagonalization (accumulators excluded).
  void add_arith_flops(std::uint64_t n) noexcept { arith_flops_ += n; }

  const Tally& tally(TransformKind kind, LedgerPhase phase) const noexcept {
    return tallies_[static_cast<std::size_t>(kind)][static_cast<std::size_t>(phase)];
  }
  std::uint64_t total_flops() const noexcept;
  std::uint64_t total_assignments() const noexcept;
  std::uint64_t skips() const noexcept { return skips_; }
  std::uint64_t arith_flops() const noexcept { return arith_flops_; }

  void merge(const OpLedger& other) noexcept;
  void reset() noexcept { *this = OpLedger{}; }

  /// One `kind.phase.metric=value` line per counter, then totals.
  std::string report() const;

  friend bool operator==(const OpLedger&, const OpLedger&) = default;

 private:
  std::array<std::array<Tally, 2>, kTransformKindCount> tallies_{};
  std::uint64_t skips_ = 0;
  std::uint64_t arith_flops_ = 0;
};

}  // namespace quatmark
