#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quatmark/image.hpp"

namespace quatmark {

enum class AttackKind : std::uint8_t { kJpeg, kMotionBlur, kCrop, kRescale, kSpeckle, kSaltPepper };

std::string_view to_string(AttackKind kind) noexcept;
/// Fixed per-kind constant mixed into default noise seeds.
std::uint64_t attack_kind_tag(AttackKind kind) noexcept;

/// Parsed form of `kind:param1[,param2][,seed]`.
///   jpeg:Q              Q in [1, 100]
///   motion:L,ANGLE      L >= 1, angle in degrees   (alias motion_blur)
///   crop:RATIO          RATIO in (0, 1)
///   rescale:FACTOR      FACTOR > 0                  (alias scale)
///   speckle:VAR[,SEED]  VAR >= 0
///   salt_pepper:D[,SEED] D in [0, 1]               (aliases sp, saltpepper)
struct AttackSpec {
  AttackKind kind = AttackKind::kJpeg;
  std::vector<double> params;
  std::optional<std::uint64_t> seed;

  /// Canonical text form, round-trips through parse_attack_spec.
  std::string str() const;
  bool is_noise() const noexcept { return kind == AttackKind::kSpeckle || kind == AttackKind::kSaltPepper; }
};

/// Throws PreconditionError on unknown kinds, wrong arity or out-of-range
/// parameters.
AttackSpec parse_attack_spec(std::string_view text);

/// Noise kinds use spec.seed, or `default_seed` when the spec has none.
RgbImage apply_attack(const RgbImage& img, const AttackSpec& spec, std::uint64_t default_seed = 0);

/// Baseline-JPEG degradation without entropy coding or chroma subsampling:
/// BT.601 full-range YCbCr, orthonormal 8x8 DCT-II, Annex K tables scaled
/// by the usual quality mapping, replicate padding, output rounded to 8 bits.
RgbImage jpeg_attack(const RgbImage& img, int quality);
/// Standard quality-scaled quantization table (0 = luma, 1 = chroma), row-major.
std::array<int, 64> jpeg_quant_table(int quality, int component);
/// Number of DCT coefficients that quantization at `quality` moves by more
/// than half a code value (on the 0..255 scale).
std::size_t jpeg_changed_coefficients(const RgbImage& img, int quality);

/// Linear motion kernel of length L at angle theta (degrees, counter-clockwise
/// from +x with y pointing up). Weight of a pixel = max(0, 1 - distance to the
/// centred segment of length L - 1); weights sum to 1. Odd square size.
RealMatrix motion_blur_kernel(double length, double angle_deg);
RgbImage motion_blur_attack(const RgbImage& img, double length, double angle_deg);

/// Top round(ratio * height) rows set to black.
RgbImage crop_attack(const RgbImage& img, double ratio);

/// Bilinear resize to round(factor * dims) and back, half-pixel centres.
RgbImage rescale_attack(const RgbImage& img, double factor);
/// Bilinear resize with half-pixel centres and clamped borders.
RgbImage resize_bilinear(const RgbImage& img, std::size_t height, std::size_t width);

/// out = clamp(in (1 + n)), n uniform on [-sqrt(3 var), sqrt(3 var)].
RgbImage speckle_attack(const RgbImage& img, double variance, std::uint64_t seed);
/// Each pixel replaced with probability `density`; half black, half white,
/// all three channels together.
RgbImage salt_pepper_attack(const RgbImage& img, double density, std::uint64_t seed);

}  // namespace quatmark
