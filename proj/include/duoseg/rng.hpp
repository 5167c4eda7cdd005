#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace duoseg {

// Self-contained PRNG (splitmix64-seeded xoshiro256++). Used everywhere
// randomness is needed so results do not depend on the standard library's
// distribution implementations. Streams are derived by hashing a master
// seed with purpose tags, which keeps every consumer independently
// reseedable from (seed, tag, counter) alone.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ull) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = uint64_t(hi - lo) + 1;
    return lo + int64_t(next_u64() % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call (the spare is discarded so that the
  // stream position is a pure function of the call count).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  uint64_t s_[4];
};

// FNV-1a over a tag string mixed with integer payloads; used to derive
// independent seed streams such as derive_seed(seed, "crop", iter).
inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t a = 0, uint64_t b = 0) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= uint64_t(uint8_t(c));
    h *= 0x100000001b3ull;
  }
  h = hash_mix(h, master);
  h = hash_mix(h, a);
  h = hash_mix(h, b);
  uint64_t x = h;
  return Rng::splitmix64(x);
}

}  // namespace duoseg
