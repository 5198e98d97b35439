#include "quatmark/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <locale>
#include <numeric>
#include <ostream>
#include <string>

#include "quatmark/errors.hpp"
#include "quatmark/parallel.hpp"
#include "quatmark/rng.hpp"

namespace quatmark {

namespace {

constexpr double kDegenerateSigma = 1e-9;

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

QuatMatrix drop_real(const QuatMatrix& q) {
  QuatMatrix p = q;
  for (double& v : p.plane(0).values()) v = 0.0;
  return p;
}

// New magnitudes for the pair (|u21|, |u31|) with |u21| - |u31| = +gap for
// bit 1 (negated for bit 0), centred on the old average when possible.
std::array<double, 2> target_magnitudes(double a, double b, double gap, int bit) {
  const double avg = (a + b) / 2.0;
  const double big = std::max(avg + gap / 2.0, gap);
  const double small = big - gap;
  return bit ? std::array<double, 2>{big, small} : std::array<double, 2>{small, big};
}

// Rewrites the `unit` components of u21 and u31 in place; returns the record.
BlockEmbedRecord modify_pair(QuatMatrix& u, Unit unit, int bit, double gap) {
  const int axis = static_cast<int>(unit);
  Quat u21 = u(1, 0);
  Quat u31 = u(2, 0);
  const double old1 = u21.imag(axis);
  const double old2 = u31.imag(axis);
  const auto mag = target_magnitudes(std::abs(old1), std::abs(old2), gap, bit);
  u21.imag(axis) = sign_of(old1) * mag[0];
  u31.imag(axis) = sign_of(old2) * mag[1];
  u.set(1, 0, u21);
  u.set(2, 0, u31);

  BlockEmbedRecord rec;
  rec.unit = unit;
  rec.bit = bit;
  rec.margin = gap;
  rec.delta1 = u21.imag(axis) - old1;
  rec.delta2 = u31.imag(axis) - old2;
  return rec;
}

struct UnitChoice {
  Unit unit = Unit::kI;
  double margin = 0.0;
};

// Cheapest unit to carry `bit` with a gap of at least `floor` that also
// dominates every other unit whose gap has the wrong sign.
UnitChoice choose_unit(const std::array<double, 3>& d, int bit, double floor, double slack) {
  const double s = bit ? 1.0 : -1.0;
  UnitChoice best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    double margin = floor;
    for (int b = 0; b < 3; ++b)
      if (b != a && sign_of(d[b]) != s) margin = std::max(margin, std::abs(d[b]) + slack);
    const double cost = std::max(0.0, margin - s * d[a]);
    if (cost < best_cost) {
      best_cost = cost;
      best = {static_cast<Unit>(a), margin};
    }
  }
  return best;
}

BlockEmbedResult degenerate_result(const QuatMatrix& pure, std::size_t units, const std::array<int, 3>& bits) {
  BlockEmbedResult out;
  out.block = project_to_storage(pure);
  for (std::size_t a = 0; a < units; ++a) {
    BlockEmbedRecord rec;
    rec.unit = static_cast<Unit>(units == 1 ? 0 : a);
    rec.bit = bits[a];
    rec.degenerate = true;
    rec.verified = bits[a] == 1;
    out.records.push_back(rec);
  }
  return out;
}

// Lifts row 1 (bit 1) or row 2 (bit 0) of each unit's channel by one code
// value, giving an all-black block a rank-one structure that carries the bits.
QuatMatrix seed_pattern(const QuatMatrix& pure, const std::array<int, 3>& bits) {
  QuatMatrix s = pure;
  for (int a = 0; a < 3; ++a) {
    const std::size_t row = bits[a] ? 1 : 2;
    for (std::size_t c = 0; c < s.cols(); ++c) s.plane(a + 1)(row, c) += 1.0 / 255.0;
  }
  return s;
}

// Search objective for the repair pass. Single mode uses the decoding score;
// triple mode sums each unit's shortfall below `target` so that progress on
// one unit is visible while another is stuck.
double repair_objective(const QuatMatrix& stored, const std::array<int, 3>& bits, std::size_t units,
                        double target) {
  if (units == 1) return std::min(decode_score(stored, bits, 1), target);
  const QsvdFactors f = qsvd(drop_real(stored));
  if (is_degenerate(f)) return -std::numeric_limits<double>::infinity();
  const std::array<double, 3> d = magnitude_gaps(f.u);
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double signed_gap = (bits[a] ? 1.0 : -1.0) * d[a];
    const double need = bits[a] ? target : std::max(target, 1e-12);
    total += std::min(signed_gap - need, 0.0);
  }
  return total;
}

// Greedy code search on a stored block: each step applies the single
// channel change of 1, 4 or 16 codes that improves the repair objective
// most, until the objective is met or stops improving. Returns the number of
// steps taken.
std::size_t repair(QuatMatrix& stored, const std::array<int, 3>& bits, std::size_t units, double target,
                   std::size_t max_steps) {
  constexpr std::array<double, 6> kSteps = {1.0, -1.0, 4.0, -4.0, 16.0, -16.0};
  const double goal = units == 1 ? target : 0.0;
  double current = repair_objective(stored, bits, units, target);
  std::size_t steps = 0;
  while (steps < max_steps && current < goal) {
    double best = current;
    int best_plane = 0;
    std::size_t best_index = 0;
    double best_value = 0.0;
    for (int k = 1; k < 4; ++k) {
      auto values = stored.plane(k).values();
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double original = values[i];
        for (const double step : kSteps) {
          const double v = to_byte(original + step / 255.0) / 255.0;
          if (v == original) continue;
          values[i] = v;
          const double candidate = repair_objective(stored, bits, units, target);
          if (candidate > best) {
            best = candidate;
            best_plane = k;
            best_index = i;
            best_value = v;
          }
        }
        values[i] = original;
      }
    }
    if (best_plane == 0) break;
    stored.plane(best_plane).values()[best_index] = best_value;
    current = best;
    ++steps;
  }
  return steps;
}

// Shared body of single (units = 1) and triple (units = 3) embedding.
BlockEmbedResult embed_units(const QuatMatrix& block, std::array<int, 3> bits, std::size_t units,
                             const EmbedConfig& cfg) {
  cfg.validate();
  for (int& b : bits) b = b ? 1 : 0;
  QuatMatrix pure = drop_real(block);
  QsvdFactors f = qsvd(pure);
  const bool seeded = is_degenerate(f);
  if (seeded) {
    pure = seed_pattern(pure, bits);
    f = qsvd(pure);
    if (is_degenerate(f)) return degenerate_result(pure, units, bits);
  }
  const std::array<double, 3> d = magnitude_gaps(f.u);

  BlockEmbedResult best;
  double best_score = -std::numeric_limits<double>::infinity();
  double last_floor = 0.0;
  for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    const double floor = cfg.attempt_floor(attempt);
    if (floor <= last_floor) break;
    last_floor = floor;
    QsvdFactors marked = f;
    std::vector<BlockEmbedRecord> recs;
    if (units == 1) {
      const UnitChoice choice = choose_unit(d, bits[0], floor, cfg.slack());
      const double gap = std::max(choice.margin, (bits[0] ? 1.0 : -1.0) * d[static_cast<int>(choice.unit)]);
      recs.push_back(modify_pair(marked.u, choice.unit, bits[0], gap));
    } else {
      for (int a = 0; a < 3; ++a) {
        const double gap = std::max(floor, (bits[a] ? 1.0 : -1.0) * d[a]);
        recs.push_back(modify_pair(marked.u, static_cast<Unit>(a), bits[a], gap));
      }
    }
    for (BlockEmbedRecord& rec : recs) {
      rec.attempts = attempt;
      rec.degenerate = seeded;
    }
    QuatMatrix stored = project_to_storage(reconstruct(marked));
    const double score = decode_score(stored, bits, units);
    if (score > best_score) {
      best = {std::move(stored), std::move(recs)};
      best_score = score;
    }
    if (score > 0.0) break;
  }

  if (!(best_score > 0.0)) {
    const std::size_t steps = repair(best.block, bits, units, cfg.threshold, cfg.max_repair_steps);
    for (BlockEmbedRecord& rec : best.records) rec.repair_steps = steps;
  }
  if (units == 1) {
    const BlockDecision dec = extract_block(best.block);
    best.records[0].verified = !dec.erasure && dec.bit == bits[0];
  } else {
    const auto dec = extract_block_triple(best.block);
    for (int a = 0; a < 3; ++a) best.records[a].verified = !dec[a].erasure && dec[a].bit == bits[a];
  }
  return best;
}

template <typename Embed>
EmbedOutput run_embed(const RgbImage& host, std::size_t count, const WatermarkKey& key, const EmbedConfig& cfg,
                      Embed&& embed_one) {
  cfg.validate();
  const BlockGrid grid = partition(encode_quaternion(host));
  if (grid.count() == 0) throw CapacityError("embed: host is smaller than one 4x4 block");
  if (count > grid.count())
    throw CapacityError("embed: payload of " + std::to_string(count) + " bits exceeds " +
                        std::to_string(grid.count()) + " blocks");
  const std::vector<BlockCoord> schedule = key_schedule(key, grid.grid_rows, grid.grid_cols, count);

  std::vector<BlockEmbedResult> results(count);
  parallel_for(count, cfg.threads, [&](std::size_t t) {
    results[t] = embed_one(grid.at(schedule[t].r, schedule[t].c), t);
    for (BlockEmbedRecord& rec : results[t].records) rec.block = schedule[t];
  });

  EmbedOutput out;
  out.image = quantize(host);
  const std::size_t b = grid.block_size;
  for (std::size_t t = 0; t < count; ++t) {
    const QuatMatrix& blk = results[t].block;
    for (int ch = 0; ch < 3; ++ch)
      for (std::size_t r = 0; r < b; ++r)
        for (std::size_t c = 0; c < b; ++c)
          out.image.at(ch, schedule[t].r * b + r, schedule[t].c * b + c) = blk.plane(ch + 1)(r, c);
    for (const BlockEmbedRecord& rec : results[t].records) {
      out.report.records.push_back(rec);
      out.report.unverified += rec.verified ? 0 : 1;
      out.report.degenerate += rec.degenerate ? 1 : 0;
    }
  }
  out.report.psnr = psnr(host, out.image);
  return out;
}

}  // namespace

void EmbedConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) throw PreconditionError("threshold must be positive");
  if (epsilon_margin < 0.0 || !std::isfinite(epsilon_margin))
    throw PreconditionError("epsilon margin must be nonnegative");
  if (max_attempts == 0) throw PreconditionError("max_attempts must be at least 1");
}

char unit_name(Unit u) noexcept { return "ijk"[static_cast<int>(u)]; }

std::vector<BlockCoord> key_schedule(const WatermarkKey& key, std::size_t grid_rows, std::size_t grid_cols,
                                     std::size_t count) {
  const std::size_t total = grid_rows * grid_cols;
  if (count > total)
    throw CapacityError("key_schedule: " + std::to_string(count) + " positions requested from " +
                        std::to_string(total) + " blocks");
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  XorShiftStar rng(key.ka);
  shuffle(order, rng);
  std::vector<BlockCoord> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) out.push_back({order[t] / grid_cols, order[t] % grid_cols});
  return out;
}

std::array<double, 3> magnitude_gaps(const QuatMatrix& u) {
  if (u.rows() < 3 || u.cols() < 1) throw DimensionError("magnitude_gaps: U needs at least 3 rows");
  const Quat u21 = u(1, 0);
  const Quat u31 = u(2, 0);
  std::array<double, 3> d{};
  for (int a = 0; a < 3; ++a) d[a] = std::abs(u21.imag(a)) - std::abs(u31.imag(a));
  return d;
}

bool is_degenerate(const QsvdFactors& f) {
  if (f.s.empty() || f.s[0] <= kDegenerateSigma || f.u.rows() < 3) return true;
  return f.u(1, 0).is_real() && f.u(2, 0).is_real();
}

QuatMatrix project_to_storage(const QuatMatrix& block) {
  QuatMatrix p(block.rows(), block.cols());
  for (int k = 1; k < 4; ++k) {
    auto src = block.plane(k).values();
    auto dst = p.plane(k).values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = to_byte(src[i]) / 255.0;
  }
  return p;
}

BlockEmbedResult embed_block(const QuatMatrix& block, int bit, const EmbedConfig& cfg) {
  return embed_units(block, {bit, bit, bit}, 1, cfg);
}

BlockEmbedResult embed_block_triple(const QuatMatrix& block, const std::array<int, 3>& bits,
                                    const EmbedConfig& cfg) {
  return embed_units(block, bits, 3, cfg);
}

double decode_score(const QuatMatrix& block, const std::array<int, 3>& bits, std::size_t units) {
  const QsvdFactors f = qsvd(drop_real(block));
  if (is_degenerate(f)) return -std::numeric_limits<double>::infinity();
  const std::array<double, 3> d = magnitude_gaps(f.u);
  if (units == 3) {
    double score = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) score = std::min(score, (bits[a] ? 1.0 : -1.0) * d[a]);
    return score;
  }
  const double s = bits[0] ? 1.0 : -1.0;
  double correct = 0.0;
  double wrong = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (sign_of(d[a]) == s)
      correct = std::max(correct, std::abs(d[a]));
    else
      wrong = std::max(wrong, std::abs(d[a]));
  }
  return correct - wrong;
}

BlockDecision extract_block(const QuatMatrix& block) {
  const QsvdFactors f = qsvd(drop_real(block));
  BlockDecision dec;
  if (is_degenerate(f)) {
    dec.erasure = true;
    return dec;
  }
  const std::array<double, 3> d = magnitude_gaps(f.u);
  int best = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(d[a]) > std::abs(d[best])) best = a;
  dec.unit = static_cast<Unit>(best);
  dec.gap = d[best];
  dec.bit = d[best] >= 0.0 ? 1 : 0;
  return dec;
}

std::array<BlockDecision, 3> extract_block_triple(const QuatMatrix& block) {
  const QsvdFactors f = qsvd(drop_real(block));
  std::array<BlockDecision, 3> out{};
  const bool degenerate = is_degenerate(f);
  const std::array<double, 3> d = degenerate ? std::array<double, 3>{} : magnitude_gaps(f.u);
  for (int a = 0; a < 3; ++a) {
    out[a].unit = static_cast<Unit>(a);
    out[a].erasure = degenerate;
    out[a].gap = d[a];
    out[a].bit = d[a] >= 0.0 ? 1 : 0;
  }
  return out;
}

EmbedOutput embed(const RgbImage& host, const BitMatrix& payload, const WatermarkKey& key, const EmbedConfig& cfg) {
  return run_embed(host, payload.size(), key, cfg, [&](const QuatMatrix& blk, std::size_t t) {
    return embed_block(blk, payload.flat()[t], cfg);
  });
}

EmbedOutput embed_triple(const RgbImage& host, const std::array<BitMatrix, 3>& payloads, const WatermarkKey& key,
                         const EmbedConfig& cfg) {
  for (const BitMatrix& p : payloads)
    if (p.rows() != payloads[0].rows() || p.cols() != payloads[0].cols())
      throw DimensionError("embed_triple: payloads differ in size");
  return run_embed(host, payloads[0].size(), key, cfg, [&](const QuatMatrix& blk, std::size_t t) {
    return embed_block_triple(blk, {payloads[0].flat()[t], payloads[1].flat()[t], payloads[2].flat()[t]}, cfg);
  });
}

namespace {

template <typename Decide>
void run_extract(const RgbImage& img, const WatermarkKey& key, std::size_t count, const EmbedConfig& cfg,
                 Decide&& decide) {
  const BlockGrid grid = partition(encode_quaternion(img));
  if (count > grid.count())
    throw CapacityError("extract: " + std::to_string(count) + " bits requested from " + std::to_string(grid.count()) +
                        " blocks");
  const std::vector<BlockCoord> schedule = key_schedule(key, grid.grid_rows, grid.grid_cols, count);
  parallel_for(count, cfg.threads, [&](std::size_t t) { decide(grid.at(schedule[t].r, schedule[t].c), t); });
}

}  // namespace

ExtractOutput extract(const RgbImage& img, const WatermarkKey& key, std::size_t rows, std::size_t cols,
                      const EmbedConfig& cfg) {
  ExtractOutput out{BitMatrix(rows, cols), 0};
  std::vector<std::uint8_t> erased(rows * cols, 0);
  run_extract(img, key, rows * cols, cfg, [&](const QuatMatrix& blk, std::size_t t) {
    const BlockDecision dec = extract_block(blk);
    out.bits.flat()[t] = static_cast<std::uint8_t>(dec.bit);
    erased[t] = dec.erasure ? 1 : 0;
  });
  out.erasures = static_cast<std::size_t>(std::count(erased.begin(), erased.end(), 1));
  return out;
}

std::array<ExtractOutput, 3> extract_triple(const RgbImage& img, const WatermarkKey& key, std::size_t rows,
                                            std::size_t cols, const EmbedConfig& cfg) {
  std::array<ExtractOutput, 3> out;
  for (auto& o : out) o.bits = BitMatrix(rows, cols);
  std::vector<std::uint8_t> erased(rows * cols, 0);
  run_extract(img, key, rows * cols, cfg, [&](const QuatMatrix& blk, std::size_t t) {
    const auto dec = extract_block_triple(blk);
    for (int a = 0; a < 3; ++a) out[a].bits.flat()[t] = static_cast<std::uint8_t>(dec[a].bit);
    erased[t] = dec[0].erasure ? 1 : 0;
  });
  const auto erasures = static_cast<std::size_t>(std::count(erased.begin(), erased.end(), 1));
  for (auto& o : out) o.erasures = erasures;
  return out;
}

void write_report_csv(std::ostream& os, const EmbedReport& report) {
  const std::locale saved = os.imbue(std::locale::classic());
  const auto precision = os.precision(9);
  os << "block_r,block_c,unit,bit,margin,delta1,delta2\n";
  for (const BlockEmbedRecord& r : report.records)
    os << r.block.r << ',' << r.block.c << ',' << unit_name(r.unit) << ',' << r.bit << ',' << r.margin << ','
       << r.delta1 << ',' << r.delta2 << '\n';
  os << "# psnr=" << report.psnr << " unverified=" << report.unverified << " degenerate=" << report.degenerate
     << '\n';
  os.precision(precision);
  os.imbue(saved);
}

PairStats analyze_pairs(const RgbImage& img, std::size_t threads) {
  const BlockGrid grid = partition(encode_quaternion(img));
  if (grid.count() == 0) throw CapacityError("analyze_pairs: image is smaller than one 4x4 block");
  PairStats st;
  st.grid_rows = grid.grid_rows;
  st.grid_cols = grid.grid_cols;
  for (auto& axis : st.coeffs)
    for (RealMatrix& m : axis) m = RealMatrix(grid.grid_rows, grid.grid_cols);
  st.degenerate.assign(grid.count(), 0);

  parallel_for(grid.count(), threads, [&](std::size_t i) {
    const QsvdFactors f = qsvd(grid.blocks[i]);
    if (is_degenerate(f)) {
      st.degenerate[i] = 1;
      return;
    }
    for (int axis = 0; axis < 3; ++axis)
      for (int x = 0; x < 4; ++x) st.coeffs[axis][x].values()[i] = f.u(static_cast<std::size_t>(x), 0).imag(axis);
  });
  st.degenerate_count = static_cast<std::size_t>(std::count(st.degenerate.begin(), st.degenerate.end(), 1));

  std::vector<double> xs;
  std::vector<double> ys;
  for (int axis = 0; axis < 3; ++axis)
    for (std::size_t p = 0; p < PairStats::kPairs.size(); ++p) {
      xs.clear();
      ys.clear();
      const auto& first = st.coeffs[axis][PairStats::kPairs[p][0] - 1].values();
      const auto& second = st.coeffs[axis][PairStats::kPairs[p][1] - 1].values();
      for (std::size_t i = 0; i < grid.count(); ++i)
        if (!st.degenerate[i]) {
          xs.push_back(first[i]);
          ys.push_back(second[i]);
        }
      const auto nonzero = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
      };
      st.nc[axis][p] = nonzero(xs) && nonzero(ys) ? ncc(xs, ys) : std::numeric_limits<double>::quiet_NaN();
    }
  return st;
}

void write_nc_csv(std::ostream& os, const PairStats& stats) {
  const std::locale saved = os.imbue(std::locale::classic());
  const auto precision = os.precision(6);
  os << "unit,first,second,nc\n";
  for (int axis = 0; axis < 3; ++axis)
    for (std::size_t p = 0; p < PairStats::kPairs.size(); ++p)
      os << "ijk"[axis] << ",u" << PairStats::kPairs[p][0] << "1,u" << PairStats::kPairs[p][1] << "1," << std::fixed
         << stats.nc[axis][p] << std::defaultfloat << '\n';
  os.precision(precision);
  os.imbue(saved);
}

}  // namespace quatmark
