#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "quatmark/quaternion.hpp"
#include "quatmark/real_matrix.hpp"

namespace quatmark {

/// Three-channel image, values nominally in [0, 1]. Channel 0 = R, 1 = G, 2 = B.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t height, std::size_t width, double fill = 0.0);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  bool empty() const noexcept { return height_ == 0 || width_ == 0; }

  RealMatrix& channel(int c) noexcept { return channels_[static_cast<std::size_t>(c)]; }
  const RealMatrix& channel(int c) const noexcept { return channels_[static_cast<std::size_t>(c)]; }

  double& at(int c, std::size_t y, std::size_t x) noexcept { return channel(c)(y, x); }
  double at(int c, std::size_t y, std::size_t x) const noexcept { return channel(c)(y, x); }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::array<RealMatrix, 3> channels_;
};

/// clamp to [0, 1], scale by 255, round half away from zero.
std::uint8_t to_byte(double v) noexcept;
/// Every channel value replaced by to_byte(v) / 255; equals save + load.
RgbImage quantize(const RgbImage& img);

/// Binary P6 with maxval 255. Throws FormatError on anything else.
RgbImage read_ppm(std::istream& in);
void write_ppm(const RgbImage& img, std::ostream& out);
RgbImage load_ppm(const std::filesystem::path& path);
void save_ppm(const RgbImage& img, const std::filesystem::path& path);

/// Q(x, y) = R i + G j + B k.
QuatMatrix encode_quaternion(const RgbImage& img);
/// Inverse of encode_quaternion; the real plane is ignored and channels are
/// clamped to [0, 1].
RgbImage decode_quaternion(const QuatMatrix& q);

/// Non-overlapping square blocks in row-major order. Rows and columns beyond
/// the last whole block are cropped; `cropped_rows/cols` record how many.
struct BlockGrid {
  std::size_t block_size = 4;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::size_t cropped_rows = 0;
  std::size_t cropped_cols = 0;
  std::vector<QuatMatrix> blocks;

  std::size_t count() const noexcept { return blocks.size(); }
  QuatMatrix& at(std::size_t br, std::size_t bc) { return blocks[br * grid_cols + bc]; }
  const QuatMatrix& at(std::size_t br, std::size_t bc) const { return blocks[br * grid_cols + bc]; }
};

BlockGrid partition(const QuatMatrix& q, std::size_t block_size = 4);
/// (grid_rows * block_size) x (grid_cols * block_size) matrix.
QuatMatrix reassemble(const BlockGrid& grid);

/// Binary matrix; entries are 0 or 1.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols, std::uint8_t fill = 0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }

  std::uint8_t operator()(std::size_t r, std::size_t c) const noexcept { return bits_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, bool v) noexcept { bits_[r * cols_ + c] = v ? 1 : 0; }
  /// Row-major flat view.
  std::span<const std::uint8_t> flat() const noexcept { return bits_; }
  std::span<std::uint8_t> flat() noexcept { return bits_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// PBM: P4 written; P1 and P4 read. A PBM 1 (black) is bit value 1.
BitMatrix read_pbm(std::istream& in);
void write_pbm(const BitMatrix& bits, std::ostream& out);
/// ASCII grid: one line per row of '0'/'1' characters.
BitMatrix read_ascii_grid(std::istream& in);
void write_ascii_grid(const BitMatrix& bits, std::ostream& out);
/// Reads PBM when the file starts with "P1"/"P4", an ASCII grid otherwise.
BitMatrix load_bits(const std::filesystem::path& path);
/// Writes PBM unless the extension is .txt.
void save_bits(const BitMatrix& bits, const std::filesystem::path& path);

/// Deterministic binary logo: a ring and a centre bar of zeros on a
/// background of ones; about one fifth of the bits are zero.
BitMatrix synthetic_logo(std::size_t rows, std::size_t cols);
/// Independent fair bits from the portable generator.
BitMatrix random_bits(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Peak-1 PSNR over all three channels in dB; +infinity for identical images.
/// Throws DimensionError when sizes differ.
double psnr(const RgbImage& a, const RgbImage& b);
/// Fraction of differing bits. Throws DimensionError when sizes differ.
double ber(const BitMatrix& w, const BitMatrix& w_star);
/// Un-centered normalized cross-correlation sum(xy)/sqrt(sum(x^2) sum(y^2)).
/// Throws DimensionError on length mismatch, DomainError on a zero vector.
double ncc(std::span<const double> x, std::span<const double> y);
double ncc(const RealMatrix& x, const RealMatrix& y);

}  // namespace quatmark
