#pragma once

#include <cmath>
#include <cstdint>

#include "tmatch/errors.hpp"

namespace tmatch {

// Deterministic, platform-independent random stream. xoshiro256++ core,
// seeded from (master_seed, stream_id) through splitmix64 so distinct
// stream ids give statistically independent streams of the same master
// seed. All variate generators are hand-rolled on top of uniform bits:
// the std <random> distributions are implementation-defined, which would
// break bit-for-bit reproducibility across toolchains.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t z = master_seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
    for (auto& word : state_) {
      word = splitmix64(z);
    }
  }

  std::uint64_t next_u64() {
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

  // Uniform double in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) fail(Errc::out_of_range, "uniform_below(0)");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inverse-CDF draw from a small pmf given as (data, size). Assumes the
  // entries sum to ~1; the last positive entry absorbs rounding slack.
  int categorical(const double* pmf, int size) {
    double u = uniform01();
    int last_positive = 0;
    for (int k = 0; k < size; ++k) {
      if (pmf[k] > 0.0) last_positive = k;
    }
    for (int k = 0; k < size; ++k) {
      if (pmf[k] <= 0.0) continue;
      if (u < pmf[k]) return k;
      u -= pmf[k];
    }
    return last_positive;
  }

  // Standard normal via Box-Muller (one value per call; the pair's second
  // value is deliberately discarded to keep the draw count predictable).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Marsaglia-Tsang gamma(shape, 1). Valid for shape > 0.
  double gamma(double shape) {
    if (!(shape > 0.0)) fail(Errc::invalid_family_params, "gamma shape must be > 0");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      double u = uniform01();
      while (u <= 0.0) u = uniform01();
      return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double ga = gamma(a);
    const double gb = gamma(b);
    return ga / (ga + gb);
  }

  // Gaussian(mu, var) conditioned on [0,1], by rejection.
  double truncated_gaussian01(double mu, double var) {
    if (!(var > 0.0)) fail(Errc::invalid_family_params, "variance must be > 0");
    const double sigma = std::sqrt(var);
    for (;;) {
      const double x = mu + sigma * normal();
      if (x >= 0.0 && x <= 1.0) return x;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& z) {
    z += 0x9E3779B97F4A7C15ULL;
    std::uint64_t r = z;
    r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
    r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
    return r ^ (r >> 31);
  }

  std::uint64_t state_[4];
};

}  // namespace tmatch
