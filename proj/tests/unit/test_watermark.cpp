#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "quatmark/errors.hpp"
#include "quatmark/image.hpp"
#include "quatmark/qsvd.hpp"
#include "quatmark/rng.hpp"
#include "quatmark/watermark.hpp"

namespace quatmark {
namespace {

RgbImage standin(const std::string& name) {
  return load_ppm(std::string(QUATMARK_TEST_DATA_DIR) + "/standin/" + name + ".ppm");
}

// Pure 4x4 block with channel values on the 8-bit grid.
QuatMatrix random_block(XorShiftStar& rng, double lo = 0.0, double hi = 1.0) {
  QuatMatrix q(4, 4);
  for (int k = 1; k < 4; ++k)
    for (double& v : q.plane(k).values()) v = to_byte(rng.uniform(lo, hi)) / 255.0;
  return q;
}

QuatMatrix smooth_block(XorShiftStar& rng) {
  QuatMatrix q(4, 4);
  for (int k = 1; k < 4; ++k) {
    const double base = rng.uniform(0.2, 0.8);
    const double gx = rng.uniform(-0.03, 0.03);
    const double gy = rng.uniform(-0.03, 0.03);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        q.plane(k)(r, c) = to_byte(base + gx * static_cast<double>(c) + gy * static_cast<double>(r) +
                                   rng.uniform(-0.01, 0.01)) /
                           255.0;
  }
  return q;
}

TEST(EmbedConfigTest, Validation) {
  EmbedConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_DOUBLE_EQ(cfg.slack(), 0.002);
  EXPECT_DOUBLE_EQ(cfg.attempt_floor(1), 0.02);
  EXPECT_DOUBLE_EQ(cfg.attempt_floor(3), 0.08);
  EXPECT_DOUBLE_EQ(cfg.attempt_floor(8), 1.0);
  cfg.threshold = 0.0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg.threshold = 0.02;
  cfg.epsilon_margin = -1.0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
}

TEST(MagnitudeGapTest, ReadsRowsOneAndTwo) {
  QuatMatrix u(4, 1);
  u.set(1, 0, Quat{0.1, -0.5, 0.2, 0.3});
  u.set(2, 0, Quat{0.0, 0.4, -0.6, 0.3});
  const auto d = magnitude_gaps(u);
  EXPECT_NEAR(d[0], 0.1, 1e-15);
  EXPECT_NEAR(d[1], -0.4, 1e-15);
  EXPECT_NEAR(d[2], 0.0, 1e-15);
  EXPECT_THROW(magnitude_gaps(QuatMatrix(2, 2)), DimensionError);
}

TEST(EmbedBlockTest, RoundTripOnRandomBlocks) {
  XorShiftStar rng(1);
  EmbedConfig cfg;
  for (int t = 0; t < 300; ++t) {
    const QuatMatrix block = t % 2 ? random_block(rng) : smooth_block(rng);
    const int bit = static_cast<int>(rng.below(2));
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_TRUE(r.block.is_pure());
    EXPECT_EQ(project_to_storage(r.block), r.block);
    EXPECT_TRUE(r.records[0].verified);
    EXPECT_GE(r.records[0].margin, cfg.threshold);
    const BlockDecision dec = extract_block(r.block);
    EXPECT_FALSE(dec.erasure);
    EXPECT_EQ(dec.bit, bit);
    EXPECT_GT(decode_score(r.block, {bit, bit, bit}, 1), 0.0);
  }
}

TEST(EmbedBlockTest, DominanceOverWrongSignUnits) {
  XorShiftStar rng(2);
  EmbedConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const QuatMatrix block = smooth_block(rng);
    const int bit = static_cast<int>(rng.below(2));
    const auto d = magnitude_gaps(qsvd(block).u);
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    const BlockEmbedRecord& rec = r.records[0];
    const double s = bit ? 1.0 : -1.0;
    for (int a = 0; a < 3; ++a) {
      if (a == static_cast<int>(rec.unit)) continue;
      if ((d[a] < 0.0 ? -1.0 : 1.0) != s) {
        EXPECT_GE(rec.margin, std::abs(d[a]) + cfg.slack() - 1e-15);
      }
    }
  }
}

TEST(EmbedBlockTest, SatisfiedGapIsRecentredWithoutChange) {
  XorShiftStar rng(3);
  EmbedConfig cfg;
  cfg.threshold = 1e-4;
  int checked = 0;
  for (int t = 0; t < 400 && checked < 20; ++t) {
    const QuatMatrix block = random_block(rng);
    const auto d = magnitude_gaps(qsvd(block).u);
    int strong = 0;
    for (int a = 1; a < 3; ++a)
      if (std::abs(d[a]) > std::abs(d[strong])) strong = a;
    if (std::abs(d[strong]) < 0.05) continue;
    const int bit = d[strong] >= 0.0 ? 1 : 0;
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    const BlockEmbedRecord& rec = r.records[0];
    EXPECT_LE(std::abs(rec.delta1) + std::abs(rec.delta2), 1e-12);
    EXPECT_EQ(rec.attempts, 1u);
    EXPECT_EQ(rec.repair_steps, 0u);
    EXPECT_EQ(r.block, block);
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(EmbedBlockTest, ChangeBoundedByCoefficientShift) {
  XorShiftStar rng(4);
  EmbedConfig cfg;
  const double rounding = std::sqrt(48.0) * 0.5 / 255.0;
  int measured = 0;
  for (int t = 0; t < 1000; ++t) {
    const QuatMatrix block = t % 3 ? smooth_block(rng) : random_block(rng);
    const int bit = static_cast<int>(rng.below(2));
    const QsvdFactors f = qsvd(block);
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    const BlockEmbedRecord& rec = r.records[0];
    if (rec.repair_steps > 0 || rec.degenerate) continue;
    const double shift = std::hypot(rec.delta1, rec.delta2);
    EXPECT_LE(frob_norm(r.block - block), f.s[0] * shift + rounding + 1e-12);
    ++measured;
  }
  EXPECT_GT(measured, 900);
}

TEST(ExtractBlockTest, PositiveScalingKeepsBits) {
  XorShiftStar rng(5);
  EmbedConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const QuatMatrix block = t % 2 ? random_block(rng) : smooth_block(rng);
    const int bit = static_cast<int>(rng.below(2));
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    for (double c : {1.0, 0.5, 0.25, 0.1}) EXPECT_EQ(extract_block(c * r.block).bit, bit) << c;
  }
}

TEST(ExtractBlockTest, SmallNoiseKeepsBits) {
  XorShiftStar rng(6);
  EmbedConfig cfg;
  int kept = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const QuatMatrix block = t % 2 ? random_block(rng) : smooth_block(rng);
    const int bit = static_cast<int>(rng.below(2));
    const BlockEmbedResult r = embed_block(block, bit, cfg);
    const double amp = 0.02 * cfg.threshold * qsvd(r.block).s[0];
    QuatMatrix noisy = r.block;
    for (int k = 1; k < 4; ++k)
      for (double& v : noisy.plane(k).values()) v += rng.uniform(-amp, amp);
    kept += extract_block(noisy).bit == bit;
  }
  EXPECT_GE(kept, trials * 99 / 100);
}

TEST(ExtractBlockTest, BlackBlockIsErasureAndSeededWhenEmbedding) {
  const QuatMatrix black(4, 4);
  const BlockDecision dec = extract_block(black);
  EXPECT_TRUE(dec.erasure);
  EXPECT_EQ(dec.bit, 1);
  for (int bit : {0, 1}) {
    const BlockEmbedResult r = embed_block(black, bit, EmbedConfig{});
    EXPECT_TRUE(r.records[0].degenerate);
    EXPECT_TRUE(r.records[0].verified);
    EXPECT_EQ(extract_block(r.block).bit, bit);
    EXPECT_FALSE(extract_block(r.block).erasure);
  }
}

TEST(EmbedBlockTripleTest, AllUnitsCarryBits) {
  XorShiftStar rng(7);
  EmbedConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const QuatMatrix block = t % 2 ? random_block(rng, 0.1, 0.9) : smooth_block(rng);
    const std::array<int, 3> bits = {static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2)),
                                     static_cast<int>(rng.below(2))};
    const BlockEmbedResult r = embed_block_triple(block, bits, cfg);
    ASSERT_EQ(r.records.size(), 3u);
    const auto dec = extract_block_triple(r.block);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(r.records[a].unit, static_cast<Unit>(a));
      EXPECT_TRUE(r.records[a].verified);
      EXPECT_EQ(dec[a].bit, bits[a]);
    }
  }
}

TEST(KeyScheduleTest, RandomPermutationPrefix) {
  const auto s = key_schedule(WatermarkKey{5}, 8, 8, 10);
  EXPECT_EQ(s.size(), 10u);
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    host_ = new RgbImage(standin("rocket"));
    payload_ = new BitMatrix(random_bits(64, 64, 77));
  }
  static void TearDownTestSuite() {
    delete host_;
    delete payload_;
  }
  static RgbImage* host_;
  static BitMatrix* payload_;
};
RgbImage* PipelineTest::host_ = nullptr;
BitMatrix* PipelineTest::payload_ = nullptr;

TEST_F(PipelineTest, RoundTripThroughStorage) {
  EmbedConfig cfg;
  cfg.threads = 4;
  const EmbedOutput out = embed(*host_, *payload_, WatermarkKey{0x1234}, cfg);
  EXPECT_EQ(out.report.records.size(), 4096u);
  EXPECT_EQ(out.report.unverified, 0u);
  EXPECT_GT(out.report.psnr, 40.0);
  EXPECT_EQ(quantize(out.image), out.image);
  std::stringstream ppm;
  write_ppm(out.image, ppm);
  const RgbImage back = read_ppm(ppm);
  const ExtractOutput ex = extract(back, WatermarkKey{0x1234}, 64, 64, cfg);
  EXPECT_EQ(ex.bits, *payload_);
  EXPECT_EQ(ex.erasures, 0u);
}

TEST_F(PipelineTest, ThreadCountDoesNotChangeOutput) {
  EmbedConfig one;
  EmbedConfig many;
  many.threads = 7;
  const BitMatrix small = random_bits(20, 20, 3);
  const EmbedOutput a = embed(*host_, small, WatermarkKey{9}, one);
  const EmbedOutput b = embed(*host_, small, WatermarkKey{9}, many);
  EXPECT_EQ(a.image, b.image);
  std::ostringstream ra, rb;
  write_report_csv(ra, a.report);
  write_report_csv(rb, b.report);
  EXPECT_EQ(ra.str(), rb.str());
}

TEST_F(PipelineTest, KeySensitivity) {
  EmbedConfig cfg;
  cfg.threads = 4;
  const EmbedOutput out = embed(*host_, *payload_, WatermarkKey{0x1234}, cfg);
  const ExtractOutput k0 = extract(out.image, WatermarkKey{0x1234}, 64, 64, cfg);
  const ExtractOutput k1 = extract(out.image, WatermarkKey{0x1235}, 64, 64, cfg);
  const double distance = ber(k0.bits, k1.bits) * 4096.0;
  EXPECT_NEAR(distance, 2048.0, 200.0);
  EXPECT_NEAR(ber(*payload_, k1.bits), 0.5, 0.05);
  EXPECT_NEAR(ber(*payload_, extract(*host_, WatermarkKey{0x1234}, 64, 64, cfg).bits), 0.5, 0.05);
}

TEST_F(PipelineTest, TripleModeRoundTripAndCost) {
  EmbedConfig cfg;
  cfg.threads = 4;
  const std::array<BitMatrix, 3> payloads = {random_bits(64, 64, 1), random_bits(64, 64, 2), random_bits(64, 64, 3)};
  const EmbedOutput triple = embed_triple(*host_, payloads, WatermarkKey{0x1234}, cfg);
  const EmbedOutput single = embed(*host_, payloads[0], WatermarkKey{0x1234}, cfg);
  EXPECT_EQ(triple.report.records.size(), 3u * 4096u);
  EXPECT_LE(triple.report.psnr, single.report.psnr);
  EXPECT_GT(triple.report.psnr, 34.0);
  const auto ex = extract_triple(triple.image, WatermarkKey{0x1234}, 64, 64, cfg);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(ex[a].bits, payloads[a]) << a;
}

TEST_F(PipelineTest, CapacityAndShapeErrors) {
  EXPECT_THROW(embed(*host_, BitMatrix(129, 128), WatermarkKey{1}, EmbedConfig{}), CapacityError);
  const std::array<BitMatrix, 3> mismatched = {BitMatrix(4, 4), BitMatrix(4, 4), BitMatrix(4, 5)};
  EXPECT_THROW(embed_triple(*host_, mismatched, WatermarkKey{1}, EmbedConfig{}), DimensionError);
  EXPECT_THROW(extract(*host_, WatermarkKey{1}, 200, 200), CapacityError);
}

TEST(ReportCsvTest, Format) {
  EmbedReport report;
  BlockEmbedRecord rec;
  rec.block = {3, 4};
  rec.unit = Unit::kJ;
  rec.bit = 1;
  rec.margin = 0.02;
  rec.delta1 = 0.01;
  rec.delta2 = -0.01;
  report.records.push_back(rec);
  report.psnr = 42.5;
  std::ostringstream os;
  write_report_csv(os, report);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("block_r,block_c,unit,bit,margin,delta1,delta2\n", 0), 0u);
  EXPECT_NE(text.find("\n3,4,j,1,"), std::string::npos);
  EXPECT_NE(text.find("# psnr=42.5"), std::string::npos);
}

TEST(AnalyzePairsTest, BlackImageIsDegenerate) {
  const PairStats stats = analyze_pairs(RgbImage(16, 16, 0.0));
  EXPECT_EQ(stats.degenerate_count, 16u);
  EXPECT_TRUE(std::isnan(stats.nc[0][PairStats::kPair23]));
}

TEST(AnalyzePairsTest, DegenerateBlocksAreExcluded) {
  RgbImage img(16, 16, 0.0);
  for (std::size_t y = 8; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x) {
      img.at(0, y, x) = 0.2 + 0.01 * static_cast<double>(x);
      img.at(1, y, x) = 0.5;
      img.at(2, y, x) = 0.7 - 0.01 * static_cast<double>(y);
    }
  const PairStats stats = analyze_pairs(img);
  EXPECT_EQ(stats.degenerate_count, 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(stats.degenerate[i], 1);
  for (int axis = 0; axis < 3; ++axis) {
    const double nc = stats.nc[static_cast<std::size_t>(axis)][PairStats::kPair23];
    EXPECT_GT(nc, 0.9);
    EXPECT_LE(nc, 1.0 + 1e-12);
  }
}

TEST(AnalyzePairsTest, NaturalImagePairCorrelation) {
  const PairStats stats = analyze_pairs(standin("astronaut"), 4);
  EXPECT_EQ(stats.grid_rows, 128u);
  for (int axis = 0; axis < 3; ++axis)
    for (double nc : stats.nc[static_cast<std::size_t>(axis)]) {
      EXPECT_GE(nc, -1.0);
      EXPECT_LE(nc, 1.0);
    }
  for (int axis = 0; axis < 3; ++axis) EXPECT_GT(stats.nc[static_cast<std::size_t>(axis)][PairStats::kPair23], 0.95);
  std::ostringstream os;
  write_nc_csv(os, stats);
  EXPECT_NE(os.str().find("i,u21,u31,"), std::string::npos);
}

}  // namespace
}  // namespace quatmark
