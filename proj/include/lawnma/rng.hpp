// Deterministic randomness: seed derivation plus explicit distribution
// transforms on top of std::mt19937_64. The engine is standardized
// bit-for-bit; the stdlib distributions are not, and reproducibility of
// every CSV byte is a hard requirement here.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace lawnma {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stable substream ids so independent draws (user placement, per-user path
// offsets, per-slot swarms, ...) never alias.
namespace stream {
inline constexpr std::uint64_t kUserPositions = 0xA1;
inline constexpr std::uint64_t kPathOffsets = 0xA2;
inline constexpr std::uint64_t kSmallScale = 0xA3;
inline constexpr std::uint64_t kPso = 0xA4;
}  // namespace stream

[[nodiscard]] inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                               std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  [[nodiscard]] std::uint64_t next() { return gen_(); }

  // [0, 1), 53-bit resolution
  [[nodiscard]] double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  [[nodiscard]] double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Box-Muller; two fresh draws per call, no cached spare, so the draw count
  // per sample is fixed.
  [[nodiscard]] double normal() {
    const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // circularly-symmetric complex normal, unit total variance
  [[nodiscard]] std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    constexpr double inv_sqrt2 = 0.7071067811865475244;
    return {re * inv_sqrt2, im * inv_sqrt2};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace lawnma
