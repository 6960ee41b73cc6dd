#pragma once
// Counter-based seedable RNG: one independent stream per (seed, stream_id).
// splitmix64 core; satisfies UniformRandomBitGenerator so the std
// distributions can run on top of it.

#include <cstdint>
#include <cmath>
#include <random>

namespace rmtlab {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() {  // in (0,1)
    return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }
  double normal() {
    // Box-Muller without cached state, so streams stay counter-like
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }
  // chi-distributed draw with (possibly non-integer) k degrees of freedom
  double chi(double k) {
    std::gamma_distribution<double> g(0.5 * k, 2.0);
    return std::sqrt(g(*this));
  }

 private:
  std::uint64_t state_;
};

}  // namespace rmtlab
