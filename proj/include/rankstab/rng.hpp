#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rankstab {

// Every randomized routine draws from its own substream, keyed by
// (master seed, purpose, index). Runs are reproducible because streams
// never share state and draw order within a stream is fixed.
namespace streams {
constexpr std::uint64_t reduce = 1;     // RC reduction probes
constexpr std::uint64_t construct = 2;  // boundary construction, indexed by iteration
constexpr std::uint64_t verify = 3;     // boundary verification, indexed by iteration
constexpr std::uint64_t volume = 4;     // final volume estimate
constexpr std::uint64_t dense = 5;      // dense-region sample pool
constexpr std::uint64_t synth = 6;      // synthetic data generation
constexpr std::uint64_t global2d = 7;   // global stability weight draws
constexpr std::uint64_t audit = 8;      // independent boundary audits
}  // namespace streams

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s = h ^ (b + 0x9e3779b97f4a7c15ULL);
  h = splitmix64(s);
  s = h ^ (c + 0x632be59bd9b4e019ULL);
  return splitmix64(s);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index = 0) {
  return std::mt19937_64(mix3(seed, purpose, index));
}

// Uniform in [0, 1) with 53 random bits. std::uniform_real_distribution is
// implementation-defined, so we map raw words ourselves.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform in [-half_width, +half_width].
inline double uniform_sym(std::mt19937_64& g, double half_width) {
  return (2.0 * uniform01(g) - 1.0) * half_width;
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  return n == 0 ? 0 : g() % n;
}

// Box-Muller, caching the second deviate. Deterministic for a fixed stream.
class gaussian_source {
 public:
  explicit gaussian_source(std::mt19937_64& g) : g_(g) {}

  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01(g_);
    double u2 = uniform01(g_);
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64& g_;
  bool have_ = false;
  double spare_ = 0.0;
};

}  // namespace rankstab
