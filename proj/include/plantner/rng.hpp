#pragma once

#include <cstdint>
#include <vector>

namespace plantner {

/// Deterministic 64-bit generator used everywhere randomness is needed.
///
/// State advances by 0x9E3779B97F4A7C15 per draw; the output is the state
/// mixed with xor-shift/multiply rounds using 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB (shifts 30, 27, 31).  Two builds seeded identically
/// therefore produce identical draw sequences, which is what makes trained
/// models byte-reproducible.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle: i runs from n-1 down to 1, j = next() % (i+1).
template <typename T>
void fisher_yates_shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace plantner
