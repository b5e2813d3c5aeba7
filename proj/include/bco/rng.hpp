#pragma once

#include <cmath>
#include <cstdint>

#include "bco/common.hpp"

namespace bco {

// Counter-based random streams. Every draw is a pure function of
// (seed, round, purpose, draw index), so replicates can run on any number of
// workers, in any order, and reproduce bit-identical sequences.

namespace detail {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fold(std::uint64_t h, std::uint64_t field) {
  return mix64(h ^ (field + kGamma + (h << 6) + (h >> 2)));
}

}  // namespace detail

enum class Purpose : std::uint32_t {
  Direction = 1,     // perturbation directions / coordinate indices
  EnvNoise = 2,      // per-round environment noise (offsets, signs)
  EnvConstruct = 3,  // environment construction draws (centers, M, paths)
  Bootstrap = 4,     // resampling in statistics
  Probe = 5,         // property-test probes
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t round, Purpose purpose)
      : key_(detail::fold(detail::fold(detail::mix64(seed + detail::kGamma),
                                       round),
                          static_cast<std::uint64_t>(purpose))) {}

  std::uint64_t next_u64() { return detail::mix64(key_ + (++idx_) * detail::kGamma); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (two uniforms per draw).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // Uniform integer in {0, ..., n-1}.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  int rademacher() { return (next_u64() & 1u) ? 1 : -1; }

  Vec normal_vec(Eigen::Index d) {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

 private:
  std::uint64_t key_;
  std::uint64_t idx_ = 0;
};

}  // namespace bco
