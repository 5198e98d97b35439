#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quatmark/image.hpp"
#include "quatmark/qsvd.hpp"

namespace quatmark {

struct WatermarkKey {
  std::uint64_t ka = 0;
};

enum class EmbedMode : std::uint8_t { kSingle, kTriple };

struct EmbedConfig {
  double threshold = 0.02;
  EmbedMode mode = EmbedMode::kSingle;
  /// Dominance slack over competing units; 0 selects threshold / 10.
  double epsilon_margin = 0.0;
  /// Embed attempts per block. Attempt n enforces a gap of at least
  /// min(threshold * 2^(n-1), 1); retries stop once the 8-bit projection of
  /// the block decodes correctly.
  std::size_t max_attempts = 8;
  /// Single-code steps the repair pass may take on a block that no attempt
  /// could verify.
  std::size_t max_repair_steps = 64;
  /// Worker threads for block-level work (0 = hardware concurrency).
  std::size_t threads = 1;

  double slack() const noexcept { return epsilon_margin > 0.0 ? epsilon_margin : threshold / 10.0; }
  double attempt_floor(std::size_t attempt) const noexcept {
    return std::min(1.0, std::ldexp(threshold, static_cast<int>(attempt) - 1));
  }
  /// Throws PreconditionError when threshold or slack is not positive.
  void validate() const;
};

/// Imaginary unit carrying a bit. Index 0 = i, 1 = j, 2 = k.
enum class Unit : std::uint8_t { kI = 0, kJ = 1, kK = 2 };
char unit_name(Unit u) noexcept;

struct BlockCoord {
  std::size_t r = 0;
  std::size_t c = 0;
  friend bool operator==(const BlockCoord&, const BlockCoord&) = default;
};

/// First `count` entries of a keyed Fisher-Yates permutation of all
/// grid_rows x grid_cols block coordinates (row-major before shuffling).
/// Throws CapacityError when count exceeds the block count.
std::vector<BlockCoord> key_schedule(const WatermarkKey& key, std::size_t grid_rows, std::size_t grid_cols,
                                     std::size_t count);

/// d_a = |(u21)_a| - |(u31)_a| for a in {i, j, k}, read from the first
/// column of U (rows 1 and 2, zero-based).
std::array<double, 3> magnitude_gaps(const QuatMatrix& u);

/// True when the block carries no usable coefficient pair (sigma_1 ~ 0 or
/// u21 and u31 have no imaginary content).
bool is_degenerate(const QsvdFactors& f);

struct BlockEmbedRecord {
  BlockCoord block;
  Unit unit = Unit::kI;
  int bit = 0;
  double margin = 0.0;   // enforced magnitude gap
  double delta1 = 0.0;   // signed change applied to (u21)_unit
  double delta2 = 0.0;   // signed change applied to (u31)_unit
  std::size_t attempts = 0;
  std::size_t repair_steps = 0;
  bool verified = false;    // 8-bit projection decodes to `bit`
  bool degenerate = false;  // all-black block, seeded with a one-level pattern
};

struct BlockEmbedResult {
  QuatMatrix block;  // pure, channel values on the 8-bit grid
  std::vector<BlockEmbedRecord> records;  // one (single) or three (triple)
};

/// Writes one bit into the unit with the cheapest modification, enforcing
/// a gap of at least the threshold and dominance over wrong-sign units.
BlockEmbedResult embed_block(const QuatMatrix& block, int bit, const EmbedConfig& cfg);
/// Writes bits[a] into unit a for all three units.
BlockEmbedResult embed_block_triple(const QuatMatrix& block, const std::array<int, 3>& bits, const EmbedConfig& cfg);

struct BlockDecision {
  int bit = 1;
  Unit unit = Unit::kI;
  double gap = 0.0;
  bool erasure = false;  // degenerate block, bit defaulted to 1
};

/// Zeroes the real plane, factorizes and decides on argmax |d_a|.
BlockDecision extract_block(const QuatMatrix& block);
/// Bit a = (d_a >= 0) for each unit; erasure flagged on degenerate blocks.
std::array<BlockDecision, 3> extract_block_triple(const QuatMatrix& block);

/// Signed decoding margin of a stored block for the wanted bits: positive
/// exactly when extraction recovers them. `units` is 1 (single) or 3
/// (triple); degenerate blocks score -infinity.
double decode_score(const QuatMatrix& block, const std::array<int, 3>& bits, std::size_t units);

/// Block channel values after dropping the real plane, clamping to [0, 1]
/// and rounding to 8 bits, exactly as save + load would.
QuatMatrix project_to_storage(const QuatMatrix& block);

struct EmbedReport {
  std::vector<BlockEmbedRecord> records;  // schedule order
  double psnr = 0.0;
  std::size_t unverified = 0;
  std::size_t degenerate = 0;
};

struct EmbedOutput {
  RgbImage image;  // already on the 8-bit grid
  EmbedReport report;
};

/// Single mode. Bits are taken row-major; block t of the key schedule
/// carries bit t. Throws CapacityError when the payload exceeds the block
/// count.
EmbedOutput embed(const RgbImage& host, const BitMatrix& payload, const WatermarkKey& key, const EmbedConfig& cfg);
/// Triple mode. The three payloads must share dimensions.
EmbedOutput embed_triple(const RgbImage& host, const std::array<BitMatrix, 3>& payloads, const WatermarkKey& key,
                         const EmbedConfig& cfg);

struct ExtractOutput {
  BitMatrix bits;
  std::size_t erasures = 0;
};

ExtractOutput extract(const RgbImage& img, const WatermarkKey& key, std::size_t rows, std::size_t cols,
                      const EmbedConfig& cfg = {});
std::array<ExtractOutput, 3> extract_triple(const RgbImage& img, const WatermarkKey& key, std::size_t rows,
                                            std::size_t cols, const EmbedConfig& cfg = {});

/// `block_r,block_c,unit,bit,margin,delta1,delta2` rows, then `# psnr=...`.
void write_report_csv(std::ostream& os, const EmbedReport& report);

/// First-column coefficients of U for every 4x4 block and their NC table.
struct PairStats {
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  /// coeffs[axis][x]: grid_rows x grid_cols matrix of the axis component of
  /// u_{x+1,1}; degenerate blocks hold 0.
  std::array<std::array<RealMatrix, 4>, 3> coeffs;
  std::vector<std::uint8_t> degenerate;  // row-major per block
  std::size_t degenerate_count = 0;
  /// nc[axis][p] for the pairs (1,2),(1,3),(1,4),(2,3),(2,4),(3,4); NaN when
  /// either coefficient plane is identically zero over the usable blocks.
  std::array<std::array<double, 6>, 3> nc{};

  static constexpr std::array<std::array<int, 2>, 6> kPairs = {{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
  /// Index of pair (2,3) in kPairs.
  static constexpr std::size_t kPair23 = 3;
};

/// NC is computed over the non-degenerate blocks only.
PairStats analyze_pairs(const RgbImage& img, std::size_t threads = 1);

/// `unit,first,second,nc` rows, e.g. `i,u21,u31,0.999312`.
void write_nc_csv(std::ostream& os, const PairStats& stats);

}  // namespace quatmark
