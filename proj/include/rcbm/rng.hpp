#pragma once

// Counter-based stream seeding on top of xoshiro256++.  Every (replicate,
// stream) pair maps to an independent generator derived from the master seed
// alone, so results do not depend on how replicates are distributed over
// worker threads.

#include <cmath>
#include <cstdint>

#include "rcbm/special.hpp"

namespace rcbm {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  Rng() : Rng(0, 0, 0) {}

  Rng(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t stream) {
    std::uint64_t h = master_seed;
    h ^= 0x9E3779B97F4A7C15ULL + (replicate << 1);
    (void)splitmix64(h);
    h ^= 0xC2B2AE3D27D4EB4FULL + (stream << 1);
    for (auto& w : state_) w = splitmix64(h);
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

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe to feed into inverse CDFs and logarithms.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double normal() { return inverse_std_normal_cdf(uniform_open()); }

  // Polar-method Gaussian: ~2x faster than the inverse CDF, used in the
  // path-stepping loops.  Consumes a variable number of uniforms.
  double normal_fast() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Largest possible excess of a within-step bridge extreme over the step
// endpoints: sqrt(-2 sigma^2 dt ln U)/2 with the smallest uniform the
// generator can emit.  Lets running-extreme loops skip the log/sqrt when the
// current record is out of reach.
inline double bridge_reach(double sigma_sq_delta) {
  return 0.5 * std::sqrt(2.0 * 37.0 * sigma_sq_delta);
}

// Within-step extremes of a Brownian path conditioned on its endpoints.
// Given X(t0)=y0, X(t0+delta)=y1 and volatility sigma, the conditional path
// is a Brownian bridge regardless of drift, so these are exact draws.
inline double bridge_max(double y0, double y1, double sigma_sq_delta, double u) {
  const double d = y1 - y0;
  return 0.5 * (y0 + y1 + std::sqrt(d * d - 2.0 * sigma_sq_delta * std::log(u)));
}

inline double bridge_min(double y0, double y1, double sigma_sq_delta, double u) {
  const double d = y1 - y0;
  return 0.5 * (y0 + y1 - std::sqrt(d * d - 2.0 * sigma_sq_delta * std::log(u)));
}

// P(bridge exceeds level b somewhere in the step | endpoints below b).
inline double bridge_cross_prob(double y0, double y1, double level,
                                double sigma_sq_delta) {
  if (y0 >= level || y1 >= level) return 1.0;
  return std::exp(-2.0 * (level - y0) * (level - y1) / sigma_sq_delta);
}

} // namespace rcbm
