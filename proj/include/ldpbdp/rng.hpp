#pragma once

#include <cmath>
#include <cstdint>

namespace ldpbdp {

// splitmix64 finalizer; used as the stream-derivation hash.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// replica_seed = mix64(mix64(master_seed) ^ replica_index). Independent of how
// replicas are distributed over threads.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(mix64(master_seed) ^ index);
}

// xoshiro256** seeded by four splitmix64 outputs. Seeding is a handful of
// multiplies, which matters because every replica gets a fresh generator.
// Uniforms and exponentials are built from raw output, so samples do not
// depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    for (auto& word : s_) {
      word = mix64(seed);
      seed += 0x9e3779b97f4a7c15ULL;
    }
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  bool coin() noexcept { return (bits() >> 63) != 0; }

  std::uint64_t bits() noexcept {
    const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace ldpbdp
