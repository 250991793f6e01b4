#ifndef ASEP_RNG_HPP
#define ASEP_RNG_HPP

#include <cmath>
#include <cstdint>

namespace asep {

// xoshiro256++ 1.0 (Blackman & Vigna, public domain), seeded through
// splitmix64. All draws are specified bit-for-bit, so seeded runs are
// reproducible across platforms; never replace with std:: distributions,
// whose output is implementation-defined.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  // Stream for replica r of a run: seed = mix(master_seed, r).
  static Rng for_stream(uint64_t master_seed, uint64_t stream) {
    return Rng(mix(master_seed, stream));
  }

  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9E3779B97F4A7C15ULL * (b + 0x632BE59BD9B4E019ULL);
    x = splitmix64(x);
    x ^= b + 0xD1B54A32D192ED03ULL;
    return splitmix64(x);
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

  // Uniform in [0,1), 53 random bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Exponential waiting time; rate must be positive. Uses -log1p(-u) so the
  // result is finite for every u in [0,1).
  double next_exponential(double rate) {
    return -std::log1p(-next_unit()) / rate;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t s_[4];
};

}  // namespace asep

#endif
