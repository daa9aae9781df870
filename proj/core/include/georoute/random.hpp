#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace georoute {

/// 64-bit generator with keyed sub-streams. Every (seed, key...) tuple maps to
/// its own engine state, so trials can be scheduled in any order.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent stream for (seed, key[0], key[1], ...).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Poisson variate: inversion for mean < 10, PTRS transformed rejection otherwise.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace georoute
