#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace critlab {

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
/// Independent streams are produced by jump(), which advances 2^128 steps.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;
  static constexpr const char* name = "xoshiro256++/splitmix64";

  explicit Xoshiro256pp(std::uint64_t seed = 0x9E3779B97F4A7C15ull) { reseed(seed); }

  /// Generator for stream `index` of a seed: reseed, then `index` jumps.
  static Xoshiro256pp stream(std::uint64_t seed, unsigned index) {
    Xoshiro256pp g(seed);
    for (unsigned i = 0; i < index; ++i) g.jump();
    return g;
  }

  void reseed(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& w : s_) w = splitmix64(z);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do x = (*this)();
    while (x >= limit);
    return x % n;
  }

  void jump() {
    static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0aba, 0xd5a61266f0c9392c,
                                              0xa9582618e03fc9aa, 0x39abdc4529b1661c};
    std::array<std::uint64_t, 4> t{0, 0, 0, 0};
    for (std::uint64_t word : kJump)
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b))
          for (int i = 0; i < 4; ++i) t[i] ^= s_[i];
        (*this)();
      }
    s_ = t;
  }

  bool operator==(const Xoshiro256pp&) const = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> s_{};
};

using Rng = Xoshiro256pp;

}  // namespace critlab
