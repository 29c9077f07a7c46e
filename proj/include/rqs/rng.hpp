#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rqs {

//! splitmix64 finalizer. Used both to expand seeds and as the mixing
//! function behind derive_run_seed, so any (master, indices) tuple maps
//! to an independent stream no matter in which order runs execute.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  return splitmix64_next(x);
}

//! Order-independent per-run seed: hash(master, point index, realization).
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t point_index,
                                     std::uint64_t realization) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ (0x9e3779b97f4a7c15ULL + point_index));
  h = mix64(h ^ (0xbf58476d1ce4e5b9ULL + realization));
  return h;
}

//! Seed for a per-layer substream inside one run (fresh coherent noise draws).
inline std::uint64_t layer_seed(std::uint64_t run_seed, std::uint64_t layer) {
  std::uint64_t h = mix64(run_seed ^ 0x94d049bb133111ebULL);
  return mix64(h ^ layer);
}

//! xoshiro256++ generator. Self-contained so that draws are bit-for-bit
//! reproducible across standard libraries, which std::normal_distribution
//! does not guarantee.
class Xoshiro256 {
 public:
  explicit Xoshiro256(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  //! Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  //! Standard normal via Box-Muller; consumes exactly two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rqs
