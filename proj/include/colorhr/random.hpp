#pragma once

#include <cstdint>
#include <limits>

namespace colorhr {

/// Counter-based generator: the i-th output (i = 1, 2, ...) is
/// mix64(seed + i * 0x9E3779B97F4A7C15), with mix64 the SplitMix64 finalizer.
/// Satisfies UniformRandomBitGenerator.
///
/// Derived variates, in terms of successive outputs x:
///   uniform     ((x >> 11) + 0.5) * 2^-53, always in (0, 1)
///   normal      Box-Muller on two uniforms, cosine branch only
///   exponential -log(uniform)
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  double uniform();
  double normal();
  double exponential();

  /// Generator for an independent stream derived from this seed.
  CounterRng substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace colorhr
