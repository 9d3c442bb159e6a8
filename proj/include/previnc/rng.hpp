#ifndef PREVINC_RNG_HPP
#define PREVINC_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace previnc {

/// Tags for deriving independent RNG streams from one master seed.
/// Stream (seed, tag, index) is reproducible regardless of execution
/// order, which is what makes parallel simulation and bootstrap
/// replicates bit-deterministic.
enum class StreamTag : std::uint64_t {
  master = 0,
  subject = 1,      // one stream per simulated subject
  onset = 2,        // one stream per simulated onset (window generator)
  replicate = 3,    // one stream per bootstrap replicate
  permutation = 4,  // one stream per permutation of the diagnostic
  counts = 5,       // frame-level count draws (Poisson onset totals)
};

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** with splitmix64 stream derivation. Hand-rolled
/// distributions keep every draw identical across platforms and across
/// standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, StreamTag::master, 0) {}

  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    std::uint64_t key = mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(tag)) ^ index);
    for (auto& word : state_) {
      key = mix64(key);
      word = key;
    }
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
      state_[0] = 0x9E3779B97F4A7C15ULL;
    }
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

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  /// Standard normal via Box-Muller (cosine branch only, so the draw
  /// count per call is fixed).
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  /// Marsaglia-Tsang for shape >= 1; shape < 1 via the boost trick.
  double gamma(double shape, double scale) {
    if (shape < 1.0) {
      const double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  double weibull(double shape, double scale) {
    return scale * std::pow(-std::log1p(-uniform01()), 1.0 / shape);
  }

  /// Exact Poisson draw by counting unit-rate exponential arrivals.
  /// O(mean), which is fine for the frame-level totals drawn here.
  std::uint64_t poisson(double mean) {
    std::uint64_t k = 0;
    double acc = exponential(1.0);
    while (acc <= mean) {
      ++k;
      acc += exponential(1.0);
    }
    return k;
  }

  std::uint64_t binomial(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  /// Index draw proportional to the given nonnegative weights.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    // modulo bias is < 2^-40 for the n used here (records per frame)
    return next_u64() % n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace previnc

#endif  // PREVINC_RNG_HPP
