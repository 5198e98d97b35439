#include "quatmark/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "quatmark/errors.hpp"
#include "quatmark/rng.hpp"

namespace quatmark {

namespace {

// Skips whitespace and '#' comments, then reads one header token.
std::string read_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  for (;;) {
    if (ch == EOF) throw FormatError("netpbm: unexpected end of header");
    if (ch == '#') {
      while (ch != '\n' && ch != EOF) ch = in.get();
      continue;
    }
    if (!std::isspace(ch)) break;
    ch = in.get();
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  if (ch == '#') in.unget();
  return tok;
}

std::size_t read_dimension(std::istream& in, const char* what) {
  const std::string tok = read_token(in);
  if (tok.empty() || tok.size() > 9 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw FormatError(std::string("netpbm: bad ") + what + " '" + tok + "'");
  const std::size_t v = std::stoul(tok);
  if (v == 0) throw FormatError(std::string("netpbm: zero ") + what);
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

RgbImage::RgbImage(std::size_t height, std::size_t width, double fill)
    : height_(height),
      width_(width),
      channels_{RealMatrix(height, width, fill), RealMatrix(height, width, fill), RealMatrix(height, width, fill)} {}

std::uint8_t to_byte(double v) noexcept {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::round(v * 255.0));
}

RgbImage quantize(const RgbImage& img) {
  RgbImage out = img;
  for (int c = 0; c < 3; ++c)
    for (double& v : out.channel(c).values()) v = to_byte(v) / 255.0;
  return out;
}

RgbImage read_ppm(std::istream& in) {
  if (read_token(in) != "P6") throw FormatError("ppm: expected magic 'P6'");
  const std::size_t width = read_dimension(in, "width");
  const std::size_t height = read_dimension(in, "height");
  const std::size_t maxval = read_dimension(in, "maxval");
  if (maxval != 255) throw FormatError("ppm: only maxval 255 is supported, got " + std::to_string(maxval));

  std::vector<unsigned char> raw(width * height * 3);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw FormatError("ppm: truncated pixel data");

  RgbImage img(height, width);
  std::size_t i = 0;
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = raw[i++] / 255.0;
  return img;
}

void write_ppm(const RgbImage& img, std::ostream& out) {
  if (img.empty()) throw FormatError("ppm: cannot write an empty image");
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raw;
  raw.reserve(img.width() * img.height() * 3);
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) raw.push_back(to_byte(img.at(c, y, x)));
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw FormatError("ppm: write failed");
}

RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return read_ppm(in);
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  write_ppm(img, out);
}

QuatMatrix encode_quaternion(const RgbImage& img) {
  return {RealMatrix(img.height(), img.width()), img.channel(0), img.channel(1), img.channel(2)};
}

RgbImage decode_quaternion(const QuatMatrix& q) {
  RgbImage img(q.rows(), q.cols());
  for (int c = 0; c < 3; ++c) {
    auto dst = img.channel(c).values();
    auto src = q.plane(c + 1).values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(src[i], 0.0, 1.0);
  }
  return img;
}

BlockGrid partition(const QuatMatrix& q, std::size_t block_size) {
  if (block_size == 0) throw DimensionError("partition: block size must be positive");
  BlockGrid grid;
  grid.block_size = block_size;
  grid.grid_rows = q.rows() / block_size;
  grid.grid_cols = q.cols() / block_size;
  grid.cropped_rows = q.rows() % block_size;
  grid.cropped_cols = q.cols() % block_size;
  grid.blocks.reserve(grid.grid_rows * grid.grid_cols);
  for (std::size_t br = 0; br < grid.grid_rows; ++br)
    for (std::size_t bc = 0; bc < grid.grid_cols; ++bc)
      grid.blocks.push_back(q.block(br * block_size, bc * block_size, block_size, block_size));
  return grid;
}

QuatMatrix reassemble(const BlockGrid& grid) {
  const std::size_t b = grid.block_size;
  if (grid.blocks.size() != grid.grid_rows * grid.grid_cols) throw DimensionError("reassemble: block count mismatch");
  QuatMatrix q(grid.grid_rows * b, grid.grid_cols * b);
  for (std::size_t br = 0; br < grid.grid_rows; ++br)
    for (std::size_t bc = 0; bc < grid.grid_cols; ++bc) {
      const QuatMatrix& blk = grid.at(br, bc);
      if (blk.rows() != b || blk.cols() != b) throw DimensionError("reassemble: block has wrong shape");
      for (int k = 0; k < 4; ++k)
        for (std::size_t r = 0; r < b; ++r)
          for (std::size_t c = 0; c < b; ++c) q.plane(k)(br * b + r, bc * b + c) = blk.plane(k)(r, c);
    }
  return q;
}

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols, std::uint8_t fill)
    : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0) {}

BitMatrix read_pbm(std::istream& in) {
  const std::string magic = read_token(in);
  if (magic != "P1" && magic != "P4") throw FormatError("pbm: expected magic 'P1' or 'P4'");
  const std::size_t cols = read_dimension(in, "width");
  const std::size_t rows = read_dimension(in, "height");
  BitMatrix bits(rows, cols);
  if (magic == "P4") {
    const std::size_t stride = (cols + 7) / 8;
    std::vector<unsigned char> row(stride);
    for (std::size_t r = 0; r < rows; ++r) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride));
      if (static_cast<std::size_t>(in.gcount()) != stride) throw FormatError("pbm: truncated raster");
      for (std::size_t c = 0; c < cols; ++c) bits.set(r, c, (row[c / 8] >> (7 - c % 8)) & 1);
    }
    return bits;
  }
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      int ch = in.get();
      while (ch != EOF && (std::isspace(ch) || ch == '#')) {
        if (ch == '#')
          while (ch != '\n' && ch != EOF) ch = in.get();
        ch = in.get();
      }
      if (ch != '0' && ch != '1') throw FormatError("pbm: bad or missing P1 sample");
      bits.set(r, c, ch == '1');
    }
  return bits;
}

void write_pbm(const BitMatrix& bits, std::ostream& out) {
  if (bits.size() == 0) throw FormatError("pbm: cannot write an empty bit matrix");
  out << "P4\n" << bits.cols() << ' ' << bits.rows() << '\n';
  const std::size_t stride = (bits.cols() + 7) / 8;
  std::vector<unsigned char> row(stride);
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t c = 0; c < bits.cols(); ++c)
      if (bits(r, c)) row[c / 8] |= static_cast<unsigned char>(0x80u >> (c % 8));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(stride));
  }
  if (!out) throw FormatError("pbm: write failed");
}

BitMatrix read_ascii_grid(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty()) continue;
    if (line.find_first_not_of("01") != std::string::npos) throw FormatError("ascii grid: only '0' and '1' allowed");
    if (!lines.empty() && line.size() != lines.front().size()) throw FormatError("ascii grid: ragged rows");
    lines.push_back(line);
  }
  if (lines.empty()) throw FormatError("ascii grid: no rows");
  BitMatrix bits(lines.size(), lines.front().size());
  for (std::size_t r = 0; r < lines.size(); ++r)
    for (std::size_t c = 0; c < lines[r].size(); ++c) bits.set(r, c, lines[r][c] == '1');
  return bits;
}

void write_ascii_grid(const BitMatrix& bits, std::ostream& out) {
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    for (std::size_t c = 0; c < bits.cols(); ++c) out << (bits(r, c) ? '1' : '0');
    out << '\n';
  }
  if (!out) throw FormatError("ascii grid: write failed");
}

BitMatrix load_bits(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  in.clear();
  in.seekg(0);
  if (magic[0] == 'P' && (magic[1] == '1' || magic[1] == '4')) return read_pbm(in);
  return read_ascii_grid(in);
}

void save_bits(const BitMatrix& bits, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  if (path.extension() == ".txt")
    write_ascii_grid(bits, out);
  else
    write_pbm(bits, out);
}

BitMatrix synthetic_logo(std::size_t rows, std::size_t cols) {
  BitMatrix bits(rows, cols, 1);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double u = (static_cast<double>(r) + 0.5) / static_cast<double>(rows) - 0.5;
      const double v = (static_cast<double>(c) + 0.5) / static_cast<double>(cols) - 0.5;
      const double rad = std::hypot(u, v);
      const bool ring = rad >= 18.0 / 64.0 && rad < 24.0 / 64.0;
      const bool bar = std::abs(u) < 2.0 / 64.0 && std::abs(v) < 6.5 / 64.0;
      if (ring || bar) bits.set(r, c, false);
    }
  return bits;
}

BitMatrix random_bits(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  XorShiftStar rng(seed);
  BitMatrix bits(rows, cols);
  for (std::uint8_t& b : bits.flat()) b = static_cast<std::uint8_t>(rng.next() >> 63);
  return bits;
}

double psnr(const RgbImage& a, const RgbImage& b) {
  if (a.height() != b.height() || a.width() != b.width()) throw DimensionError("psnr: image sizes differ");
  double sse = 0.0;
  for (int c = 0; c < 3; ++c) {
    auto x = a.channel(c).values();
    auto y = b.channel(c).values();
    for (std::size_t i = 0; i < x.size(); ++i) sse += (x[i] - y[i]) * (x[i] - y[i]);
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double n = 3.0 * static_cast<double>(a.height() * a.width());
  return 10.0 * std::log10(n / sse);
}

double ber(const BitMatrix& w, const BitMatrix& w_star) {
  if (w.rows() != w_star.rows() || w.cols() != w_star.cols()) throw DimensionError("ber: bit matrix sizes differ");
  if (w.size() == 0) throw DimensionError("ber: empty bit matrix");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < w.size(); ++i) diff += w.flat()[i] != w_star.flat()[i];
  return static_cast<double>(diff) / static_cast<double>(w.size());
}

double ncc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("ncc: lengths differ");
  double xy = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) throw DomainError("ncc: undefined for a zero vector");
  return std::clamp(xy / std::sqrt(xx * yy), -1.0, 1.0);
}

double ncc(const RealMatrix& x, const RealMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("ncc: matrix shapes differ");
  return ncc(x.values(), y.values());
}

}  // namespace quatmark
