#pragma once

#include <cstdint>
#include <limits>

namespace ncprox {

/// Counter-based pseudo random generator.
///
/// Output k of a stream is a pure function of (key, k), so a generator can be
/// copied, rewound, or split into independent child streams without any
/// shared state. Satisfies UniformRandomBitGenerator. Bounded integers and
/// floating point variates are produced by the member helpers below rather
/// than <random> distributions so that sequences are identical across
/// standard library implementations.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Independent child stream; does not advance this generator.
  CounterRng split(std::uint64_t stream_id) const noexcept;

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept;

  /// Standard normal variate (Box-Muller, one output per two uniforms).
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace ncprox
