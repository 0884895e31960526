#pragma once

#include <cstdint>
#include <random>

namespace jointlim {

// SplitMix64 (Steele, Lea & Flood 2014; Vigna's fixed-increment variant).
// Used here for seed derivation only: it maps nearby seeds to well-separated
// 64-bit values, so replication and stream indices can be folded into a master
// seed without correlating the resulting generators.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += UINT64_C(0x9E3779B97F4A7C15));
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() { return next(); }

 private:
  std::uint64_t state_;
};

// Seed of the stream with the given index under a master seed.
//
// Defined as output number `index` (0-based) of the SplitMix64 sequence seeded
// with `master`, computed by a constant-time jump: the SplitMix64 state before
// output k is master + k * golden, so we start the counter there and take one
// step. Distinct indices under the same master give distinct, decorrelated
// seeds, independent of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 g(master + index * UINT64_C(0x9E3779B97F4A7C15));
  return g.next();
}

// Draw engine for a derived seed. The seed is scrambled once through
// SplitMix64 so that small consecutive user seeds do not land the Mersenne
// Twister in nearby states.
inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(SplitMix64(seed).next());
}

}  // namespace jointlim
