#pragma once

// Counter-based pseudo-random streams. Every draw is a pure function of
// (stream key, counter), so work sharded across threads sees exactly the
// same values as a sequential run. Streams are split by hashing child
// indices into the key; the per-counter output is the SplitMix64 sequence.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace netboot {

namespace rng_detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace rng_detail

class Stream {
 public:
  static Stream root(std::uint64_t seed) {
    return Stream(rng_detail::mix64(seed + rng_detail::kGolden));
  }

  // Derive an independent sub-stream; (a), (a,b), (a,b,c) index trees of work.
  Stream child(std::uint64_t a) const {
    return Stream(rng_detail::mix64(key_ ^ rng_detail::mix64(a + 0x165667b19e3779f9ULL)));
  }
  Stream child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }
  Stream child(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return child(a).child(b).child(c);
  }

  // Pure access by counter: at(i) never perturbs stream state.
  std::uint64_t at(std::uint64_t counter) const {
    return rng_detail::mix64(key_ + (counter + 1) * rng_detail::kGolden);
  }
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(at(counter) >> 11) * 0x1.0p-53;
  }

  // Stateful draws walk the same counter space from 0.
  std::uint64_t next_u64() { return at(cursor_++); }
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased bounded draw by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = n * (~std::uint64_t{0} / n);
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v < limit) return v % n;
    }
  }

  // Box-Muller; two uniforms per call, cosine branch only.
  double next_normal() {
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t key() const { return key_; }

 private:
  explicit Stream(std::uint64_t key) : key_(key) {}
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

// Fisher-Yates; deterministic given the stream.
template <typename T>
void shuffle(std::vector<T>& v, Stream& s) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(s.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace netboot
