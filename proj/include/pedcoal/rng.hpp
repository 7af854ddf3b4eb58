#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace pedcoal {

// Deterministic, platform-independent random streams. A stream is keyed by a
// master seed plus a purpose tag and up to three indices, so replicates and
// threads can each own an independent stream whose output never depends on
// scheduling. Generator is xoshiro256++ with splitmix64 state expansion.
class RngStream {
 public:
  RngStream() : RngStream(0, "default") {}

  RngStream(std::uint64_t master_seed, std::string_view tag, std::uint64_t i0 = 0,
            std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
    std::uint64_t k = master_seed;
    k = mix(k ^ fnv1a(tag));
    k = mix(k ^ i0);
    k = mix(k ^ i1);
    k = mix(k ^ i2);
    for (auto& w : s_) {
      k += 0x9e3779b97f4a7c15ULL;
      w = splitmix(k);
    }
  }

  // Child stream; advances this stream by one draw.
  RngStream fork(std::string_view tag, std::uint64_t i0 = 0) {
    return RngStream(next_u64(), tag, i0);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as log() argument.
  double next_unit_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Uniform integer in [0, n), n >= 1. Lemire's debiased multiply.
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (-n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool next_coin() { return (next_u64() >> 63) != 0; }

  double exponential(double rate) { return -std::log(next_unit_pos()) / rate; }

  // Number of Bernoulli(p) trials up to and including the first success (>= 1).
  // Returns a saturated large value when p is vanishingly small.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    if (p <= 1e-300) return UINT64_MAX / 2;
    const double g = std::floor(std::log(next_unit_pos()) / std::log1p(-p));
    if (g >= 9.0e18) return UINT64_MAX / 2;
    return 1 + static_cast<std::uint64_t>(g);
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0) return 0;
    if (mean < 30.0) {
      // Knuth product method.
      const double l = std::exp(-mean);
      std::uint64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= next_unit_pos();
      } while (p > l);
      return k - 1;
    }
    return poisson_ptrs(mean);
  }

  // Binomial(n, p) by coin flips for small n, inversion otherwise.
  std::uint64_t binomial(std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      if (next_unit() < p) ++k;
    return k;
  }

 private:
  std::uint64_t s_[4];

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t mix(std::uint64_t x) { return splitmix(x); }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Hoermann's transformed rejection (PTRS) for large means.
  std::uint64_t poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = next_unit() - 0.5;
      const double v = next_unit_pos();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (kf < 0) continue;
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
      if (us < 0.013 && v > us) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * log_mean - mean - std::lgamma(kf + 1.0))
        return static_cast<std::uint64_t>(kf);
    }
  }
};

}  // namespace pedcoal
