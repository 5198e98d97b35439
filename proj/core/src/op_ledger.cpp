#include "quatmark/op_ledger.hpp"

#include <sstream>

namespace quatmark {

std::string_view to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::kHouseholder1: return "householder1";
    case TransformKind::kHouseholder2: return "householder2";
    case TransformKind::kHouseholder3: return "householder3";
    case TransformKind::kGivens: return "givens";
    case TransformKind::kPhase: return "phase";
  }
  return "unknown";
}

std::string_view to_string(LedgerPhase phase) noexcept {
  return phase == LedgerPhase::kGenerate ? "generate" : "apply";
}

void OpLedger::charge(TransformKind kind, LedgerPhase phase, std::uint64_t units) noexcept {
  const CalibratedCost cost = calibrated_cost(kind, phase);
  Tally& t = tallies_[static_cast<std::size_t>(kind)][static_cast<std::size_t>(phase)];
  t.events += units;
  t.assignments += cost.assignments * units;
  t.flops += cost.flops * units;
}

std::uint64_t OpLedger::total_flops() const noexcept {
  std::uint64_t s = 0;
  for (const auto& kind : tallies_)
    for (const auto& t : kind) s += t.flops;
  return s;
}

std::uint64_t OpLedger::total_assignments() const noexcept {
  std::uint64_t s = 0;
  for (const auto& kind : tallies_)
    for (const auto& t : kind) s += t.assignments;
  return s;
}

void OpLedger::merge(const OpLedger& other) noexcept {
  for (std::size_t k = 0; k < kTransformKindCount; ++k)
    for (std::size_t p = 0; p < 2; ++p) {
      tallies_[k][p].events += other.tallies_[k][p].events;
      tallies_[k][p].assignments += other.tallies_[k][p].assignments;
      tallies_[k][p].flops += other.tallies_[k][p].flops;
    }
  skips_ += other.skips_;
  arith_flops_ += other.arith_flops_;
}

std::string OpLedger::report() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < kTransformKindCount; ++k)
    for (std::size_t p = 0; p < 2; ++p) {
      const auto kind = to_string(static_cast<TransformKind>(k));
      const auto phase = to_string(static_cast<LedgerPhase>(p));
      const Tally& t = tallies_[k][p];
      os << kind << '.' << phase << ".events=" << t.events << '\n';
      os << kind << '.' << phase << ".assignments=" << t.assignments << '\n';
      os << kind << '.' << phase << ".flops=" << t.flops << '\n';
    }
  os << "skip.events=" << skips_ << '\n';
  os << "bidiag.arith.flops=" << arith_flops_ << '\n';
  os << "total.assignments=" << total_assignments() << '\n';
  os << "total.flops=" << total_flops() << '\n';
  return os.str();
}

}  // namespace quatmark
