#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace melodikit {

// Deterministic random source. All randomized procedures take one root seed;
// per-chain / per-fold / per-resample streams are derived with substream().
// We draw variates from the raw mt19937_64 output ourselves instead of using
// std::*_distribution, whose sequences are not pinned down by the standard,
// so results are reproducible across standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  // Independent stream derived from (root seed, stream id).
  Rng substream(std::uint64_t id) const {
    return Rng(mix(seed_ ^ mix(id + 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    assert(n > 0);
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return u01() < p; }

  // Standard normal via Box-Muller (cosine branch).
  double normal() {
    double u1 = u01();
    double u2 = u01();
    while (u1 <= 0.0) u1 = u01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Draw an index from an unnormalized nonnegative weight vector.
  std::size_t categorical(const double *w, std::size_t n) {
    assert(n > 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w[i];
    double u = u01() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] > 0.0) last_positive = i;
      acc += w[i];
      if (u < acc) return i;
    }
    // Floating-point tail: fall back to the last positive-mass index.
    return last_positive;
  }

  template <typename T>
  void shuffle(T *v, std::size_t n) {
    // Fisher-Yates; std::shuffle is not seed-stable across implementations.
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer.
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

} // namespace melodikit
