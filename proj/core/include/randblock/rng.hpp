#pragma once

#include <cstdint>
#include <limits>

namespace randblock {

/// Counter-based random stream keyed by (seed, stream index).
///
/// The k-th output is a pure function of (seed, index, k), so ensemble
/// members can be generated in any order or on any thread and still be
/// bit-identical. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t index);

  result_type operator()() { return at(counter_++); }

  /// Output at an absolute counter position; does not advance the stream.
  [[nodiscard]] result_type at(std::uint64_t counter) const;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  [[nodiscard]] std::uint64_t position() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

}  // namespace randblock
