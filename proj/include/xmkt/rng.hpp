#pragma once

#include <cmath>
#include <cstdint>

namespace xmkt {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256** with hand-rolled distributions. <random> distribution objects
// are implementation-defined, so identical seeds would not give identical
// draws across standard libraries; these do.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // uniform in [0, 1), 53-bit resolution
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // unbiased integer in [0, bound)
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~0ull - ~0ull % bound;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  // inclusive on both ends
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // standard normal, Marsaglia polar method
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double exponential(double mean) { return -mean * std::log(1.0 - next_unit()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Independent stream per (master seed, domain, index). Agent populations can
// grow or shrink without perturbing the other streams.
inline Rng make_stream(std::uint64_t master, std::uint64_t domain, std::uint64_t index = 0) {
  std::uint64_t x = master;
  std::uint64_t h = splitmix64(x);
  x = h ^ (0x9e3779b97f4a7c15ull * (domain + 1));
  h = splitmix64(x);
  x = h ^ (0xbf58476d1ce4e5b9ull * (index + 1));
  return Rng(splitmix64(x));
}

namespace rng_domain {
constexpr std::uint64_t kCommonValues = 1;
constexpr std::uint64_t kShuffle = 2;
constexpr std::uint64_t kPopulation = 3;
constexpr std::uint64_t kAgent = 4;
}  // namespace rng_domain

}  // namespace xmkt
