#include "quatmark/rng.hpp"

#include <utility>

namespace quatmark {

std::uint64_t XorShiftStar::below(std::uint64_t bound) noexcept {
  // Rejects the biased low tail of the 64-bit range.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

void shuffle(std::span<std::size_t> items, XorShiftStar& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace quatmark
