#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace dnet {

// SplitMix64 (Steele, Lea & Flood, 2014). Used both as the bit generator and
// as the key-mixing function that derives independent streams from
// (seed, index...) tuples, so every random draw is reproducible from the
// run seed and a counter without any shared state.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  std::uint64_t state() const { return state_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed of the stream addressed by `keys` under `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = SplitMix64::mix(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t k : keys) {
    h = SplitMix64::mix(h ^ SplitMix64::mix(k + 0x632be59bd9b4e019ULL));
  }
  return h;
}

inline SplitMix64 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return SplitMix64(derive_seed(seed, keys));
}

// Uniform integer in [0, bound) by rejection; bound > 0.
template <class Gen>
std::uint64_t uniform_below(Gen& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t x = gen();
    if (x < limit) return x % bound;
  }
}

// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform_unit(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace dnet
