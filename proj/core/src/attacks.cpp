#include "quatmark/attacks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "quatmark/errors.hpp"
#include "quatmark/rng.hpp"

namespace quatmark {

namespace {

constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// basis[u][x] = c(u) cos((2x + 1) u pi / 16), orthonormal.
struct DctBasis {
  std::array<std::array<double, 8>, 8> b{};
  DctBasis() {
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x) {
        const double cu = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
        b[u][x] = cu * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
      }
  }
};

const DctBasis& dct_basis() {
  static const DctBasis basis;
  return basis;
}

using Block8 = std::array<double, 64>;

Block8 forward_dct(const Block8& in) {
  const auto& b = dct_basis().b;
  Block8 tmp{};
  Block8 out{};
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += b[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = s;
    }
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += b[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = s;
    }
  return out;
}

Block8 inverse_dct(const Block8& in) {
  const auto& b = dct_basis().b;
  Block8 tmp{};
  Block8 out{};
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += b[u][x] * in[v * 8 + u];
      tmp[v * 8 + x] = s;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int v = 0; v < 8; ++v) s += b[v][y] * tmp[v * 8 + x];
      out[y * 8 + x] = s;
    }
  return out;
}

// Y, Cb, Cr planes on the 0..255 scale, padded to multiples of 8 by edge
// replication.
struct YccPlanes {
  std::size_t height = 0;
  std::size_t width = 0;
  std::array<RealMatrix, 3> p;
};

YccPlanes to_ycc(const RgbImage& img) {
  YccPlanes y;
  y.height = (img.height() + 7) / 8 * 8;
  y.width = (img.width() + 7) / 8 * 8;
  for (auto& m : y.p) m = RealMatrix(y.height, y.width);
  for (std::size_t r = 0; r < y.height; ++r)
    for (std::size_t c = 0; c < y.width; ++c) {
      const std::size_t sr = std::min(r, img.height() - 1);
      const std::size_t sc = std::min(c, img.width() - 1);
      const double R = 255.0 * img.at(0, sr, sc);
      const double G = 255.0 * img.at(1, sr, sc);
      const double B = 255.0 * img.at(2, sr, sc);
      y.p[0](r, c) = 0.299 * R + 0.587 * G + 0.114 * B;
      y.p[1](r, c) = -0.168736 * R - 0.331264 * G + 0.5 * B + 128.0;
      y.p[2](r, c) = 0.5 * R - 0.418688 * G - 0.081312 * B + 128.0;
    }
  return y;
}

Block8 load_block(const RealMatrix& m, std::size_t r0, std::size_t c0) {
  Block8 b{};
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) b[y * 8 + x] = m(r0 + y, c0 + x) - 128.0;
  return b;
}

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::kJpeg: return "jpeg";
    case AttackKind::kMotionBlur: return "motion";
    case AttackKind::kCrop: return "crop";
    case AttackKind::kRescale: return "rescale";
    case AttackKind::kSpeckle: return "speckle";
    case AttackKind::kSaltPepper: return "salt_pepper";
  }
  return "unknown";
}

std::uint64_t attack_kind_tag(AttackKind kind) noexcept {
  return mix64(0xA77AC4ULL + static_cast<std::uint64_t>(kind));
}

std::string AttackSpec::str() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << to_string(kind) << ':';
  for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
  if (seed) os << ",0x" << std::hex << *seed;
  return os.str();
}

AttackSpec parse_attack_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw PreconditionError("attack spec '" + std::string(text) + "' lacks ':'");
  const std::string_view name = text.substr(0, colon);
  AttackSpec spec;
  std::size_t arity = 1;
  bool seeded = false;
  if (name == "jpeg") {
    spec.kind = AttackKind::kJpeg;
  } else if (name == "motion" || name == "motion_blur") {
    spec.kind = AttackKind::kMotionBlur;
    arity = 2;
  } else if (name == "crop") {
    spec.kind = AttackKind::kCrop;
  } else if (name == "rescale" || name == "scale") {
    spec.kind = AttackKind::kRescale;
  } else if (name == "speckle") {
    spec.kind = AttackKind::kSpeckle;
    seeded = true;
  } else if (name == "salt_pepper" || name == "sp" || name == "saltpepper") {
    spec.kind = AttackKind::kSaltPepper;
    seeded = true;
  } else {
    throw PreconditionError("unknown attack kind '" + std::string(name) + "'");
  }

  std::vector<std::string_view> fields;
  std::string_view rest = text.substr(colon + 1);
  for (;;) {
    const auto comma = rest.find(',');
    fields.push_back(rest.substr(0, comma));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (fields.size() != arity && !(seeded && fields.size() == arity + 1))
    throw PreconditionError("attack '" + std::string(name) + "' expects " + std::to_string(arity) + " parameter(s)");

  for (std::size_t i = 0; i < arity; ++i) {
    double v = 0.0;
    const std::string_view f = fields[i];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
      throw PreconditionError("attack parameter '" + std::string(f) + "' is not a number");
    spec.params.push_back(v);
  }
  if (fields.size() == arity + 1) {
    std::string_view f = fields[arity];
    int base = 10;
    if (f.starts_with("0x") || f.starts_with("0X")) {
      f.remove_prefix(2);
      base = 16;
    }
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), s, base);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
      throw PreconditionError("attack seed '" + std::string(fields[arity]) + "' is not a 64-bit integer");
    spec.seed = s;
  }

  const double p = spec.params[0];
  switch (spec.kind) {
    case AttackKind::kJpeg:
      if (p < 1 || p > 100 || p != std::floor(p)) throw PreconditionError("jpeg quality must be an integer in [1, 100]");
      break;
    case AttackKind::kMotionBlur:
      if (p < 1) throw PreconditionError("motion length must be >= 1");
      break;
    case AttackKind::kCrop:
      if (!(p > 0 && p < 1)) throw PreconditionError("crop ratio must be in (0, 1)");
      break;
    case AttackKind::kRescale:
      if (!(p > 0)) throw PreconditionError("rescale factor must be > 0");
      break;
    case AttackKind::kSpeckle:
      if (p < 0) throw PreconditionError("speckle variance must be >= 0");
      break;
    case AttackKind::kSaltPepper:
      if (p < 0 || p > 1) throw PreconditionError("salt & pepper density must be in [0, 1]");
      break;
  }
  return spec;
}

RgbImage apply_attack(const RgbImage& img, const AttackSpec& spec, std::uint64_t default_seed) {
  const std::uint64_t seed = spec.seed.value_or(default_seed);
  switch (spec.kind) {
    case AttackKind::kJpeg: return jpeg_attack(img, static_cast<int>(spec.params.at(0)));
    case AttackKind::kMotionBlur: return motion_blur_attack(img, spec.params.at(0), spec.params.at(1));
    case AttackKind::kCrop: return crop_attack(img, spec.params.at(0));
    case AttackKind::kRescale: return rescale_attack(img, spec.params.at(0));
    case AttackKind::kSpeckle: return speckle_attack(img, spec.params.at(0), seed);
    case AttackKind::kSaltPepper: return salt_pepper_attack(img, spec.params.at(0), seed);
  }
  throw PreconditionError("apply_attack: unknown kind");
}

std::array<int, 64> jpeg_quant_table(int quality, int component) {
  if (quality < 1 || quality > 100) throw PreconditionError("jpeg quality must be in [1, 100]");
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  const auto& base = component == 0 ? kLumaBase : kChromaBase;
  std::array<int, 64> t{};
  for (std::size_t i = 0; i < 64; ++i) t[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return t;
}

RgbImage jpeg_attack(const RgbImage& img, int quality) {
  if (img.empty()) return img;
  const std::array<std::array<int, 64>, 2> tables = {jpeg_quant_table(quality, 0), jpeg_quant_table(quality, 1)};
  YccPlanes ycc = to_ycc(img);
  for (int ch = 0; ch < 3; ++ch) {
    const auto& q = tables[ch == 0 ? 0 : 1];
    RealMatrix& plane = ycc.p[static_cast<std::size_t>(ch)];
    for (std::size_t r0 = 0; r0 < ycc.height; r0 += 8)
      for (std::size_t c0 = 0; c0 < ycc.width; c0 += 8) {
        Block8 coef = forward_dct(load_block(plane, r0, c0));
        for (std::size_t i = 0; i < 64; ++i) coef[i] = std::round(coef[i] / q[i]) * q[i];
        const Block8 px = inverse_dct(coef);
        for (std::size_t y = 0; y < 8; ++y)
          for (std::size_t x = 0; x < 8; ++x) plane(r0 + y, c0 + x) = px[y * 8 + x] + 128.0;
      }
  }
  RgbImage out(img.height(), img.width());
  for (std::size_t r = 0; r < img.height(); ++r)
    for (std::size_t c = 0; c < img.width(); ++c) {
      const double Y = ycc.p[0](r, c);
      const double Cb = ycc.p[1](r, c) - 128.0;
      const double Cr = ycc.p[2](r, c) - 128.0;
      const double rgb[3] = {Y + 1.402 * Cr, Y - 0.344136 * Cb - 0.714136 * Cr, Y + 1.772 * Cb};
      for (int ch = 0; ch < 3; ++ch) out.at(ch, r, c) = to_byte(rgb[ch] / 255.0) / 255.0;
    }
  return out;
}

std::size_t jpeg_changed_coefficients(const RgbImage& img, int quality) {
  if (img.empty()) return 0;
  const std::array<std::array<int, 64>, 2> tables = {jpeg_quant_table(quality, 0), jpeg_quant_table(quality, 1)};
  const YccPlanes ycc = to_ycc(img);
  std::size_t changed = 0;
  for (int ch = 0; ch < 3; ++ch) {
    const auto& q = tables[ch == 0 ? 0 : 1];
    for (std::size_t r0 = 0; r0 < ycc.height; r0 += 8)
      for (std::size_t c0 = 0; c0 < ycc.width; c0 += 8) {
        const Block8 coef = forward_dct(load_block(ycc.p[static_cast<std::size_t>(ch)], r0, c0));
        for (std::size_t i = 0; i < 64; ++i)
          if (std::abs(coef[i] - std::round(coef[i] / q[i]) * q[i]) > 0.5) ++changed;
      }
  }
  return changed;
}

RealMatrix motion_blur_kernel(double length, double angle_deg) {
  if (!(length >= 1.0)) throw PreconditionError("motion_blur_kernel: length must be >= 1");
  const double half = (length - 1.0) / 2.0;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double ux = std::cos(theta);
  const double uy = std::sin(theta);
  const auto radius = static_cast<std::size_t>(std::ceil(half)) + 1;
  const std::size_t size = 2 * radius + 1;
  RealMatrix k(size, size);
  double total = 0.0;
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c) {
      const double px = static_cast<double>(c) - static_cast<double>(radius);
      const double py = static_cast<double>(radius) - static_cast<double>(r);
      const double t = std::clamp(px * ux + py * uy, -half, half);
      const double dist = std::hypot(px - t * ux, py - t * uy);
      const double w = std::max(0.0, 1.0 - dist);
      k(r, c) = w;
      total += w;
    }
  for (double& w : k.values()) w /= total;
  return k;
}

RgbImage motion_blur_attack(const RgbImage& img, double length, double angle_deg) {
  const RealMatrix k = motion_blur_kernel(length, angle_deg);
  const auto radius = static_cast<std::ptrdiff_t>(k.rows() / 2);
  const auto h = static_cast<std::ptrdiff_t>(img.height());
  const auto w = static_cast<std::ptrdiff_t>(img.width());
  RgbImage out(img.height(), img.width());
  for (int ch = 0; ch < 3; ++ch)
    for (std::ptrdiff_t y = 0; y < h; ++y)
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        double s = 0.0;
        for (std::ptrdiff_t dy = -radius; dy <= radius; ++dy)
          for (std::ptrdiff_t dx = -radius; dx <= radius; ++dx) {
            const double kw = k(static_cast<std::size_t>(dy + radius), static_cast<std::size_t>(dx + radius));
            if (kw == 0.0) continue;
            const auto sy = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(y + dy, 0, h - 1));
            const auto sx = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(x + dx, 0, w - 1));
            s += kw * img.at(ch, sy, sx);
          }
        out.at(ch, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = std::clamp(s, 0.0, 1.0);
      }
  return out;
}

RgbImage crop_attack(const RgbImage& img, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw PreconditionError("crop_attack: ratio must be in (0, 1)");
  RgbImage out = img;
  const auto rows = std::min(img.height(), static_cast<std::size_t>(std::round(ratio * static_cast<double>(img.height()))));
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t y = 0; y < rows; ++y)
      for (std::size_t x = 0; x < img.width(); ++x) out.at(ch, y, x) = 0.0;
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw PreconditionError("resize_bilinear: target size must be positive");
  if (img.empty()) throw PreconditionError("resize_bilinear: empty source");
  struct Tap {
    std::size_t i0, i1;
    double f;
  };
  auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t o = 0; o < out; ++o) {
      const double src = std::clamp((static_cast<double>(o) + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
      const auto i0 = static_cast<std::size_t>(std::floor(src));
      t[o] = {i0, std::min(i0 + 1, in - 1), src - static_cast<double>(i0)};
    }
    return t;
  };
  const std::vector<Tap> ty = taps(img.height(), height);
  const std::vector<Tap> tx = taps(img.width(), width);
  RgbImage out(height, width);
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t y = 0; y < height; ++y)
      for (std::size_t x = 0; x < width; ++x) {
        const Tap& a = ty[y];
        const Tap& b = tx[x];
        const double top = (1.0 - b.f) * img.at(ch, a.i0, b.i0) + b.f * img.at(ch, a.i0, b.i1);
        const double bot = (1.0 - b.f) * img.at(ch, a.i1, b.i0) + b.f * img.at(ch, a.i1, b.i1);
        out.at(ch, y, x) = (1.0 - a.f) * top + a.f * bot;
      }
  return out;
}

RgbImage rescale_attack(const RgbImage& img, double factor) {
  if (!(factor > 0.0)) throw PreconditionError("rescale_attack: factor must be > 0");
  const auto h = static_cast<std::size_t>(std::round(factor * static_cast<double>(img.height())));
  const auto w = static_cast<std::size_t>(std::round(factor * static_cast<double>(img.width())));
  if (h == 0 || w == 0) throw PreconditionError("rescale_attack: factor shrinks the image to nothing");
  if (h == img.height() && w == img.width()) return img;
  return resize_bilinear(resize_bilinear(img, h, w), img.height(), img.width());
}

RgbImage speckle_attack(const RgbImage& img, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0)) throw PreconditionError("speckle_attack: variance must be >= 0");
  RgbImage out = img;
  if (variance == 0.0) return out;
  const double amp = std::sqrt(3.0 * variance);
  for (int ch = 0; ch < 3; ++ch) {
    auto v = out.channel(ch).values();
    const std::uint64_t base = static_cast<std::uint64_t>(ch) * v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double n = (2.0 * counter_uniform(seed, base + i) - 1.0) * amp;
      v[i] = std::clamp(v[i] * (1.0 + n), 0.0, 1.0);
    }
  }
  return out;
}

RgbImage salt_pepper_attack(const RgbImage& img, double density, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0)) throw PreconditionError("salt_pepper_attack: density must be in [0, 1]");
  RgbImage out = img;
  const std::size_t n = img.height() * img.width();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = counter_uniform(seed, i);
    if (!(u < density)) continue;
    const double value = u < density / 2.0 ? 0.0 : 1.0;
    for (int ch = 0; ch < 3; ++ch) out.channel(ch).values()[i] = value;
  }
  return out;
}

}  // namespace quatmark
