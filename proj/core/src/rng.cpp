#include "randblock/rng.hpp"

namespace randblock {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t index)
    : key_(mix64(mix64(seed + kGolden) ^ (index * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL))) {}

CounterRng::result_type CounterRng::at(std::uint64_t counter) const {
  return mix64(key_ + (counter + 1) * kGolden);
}

}  // namespace randblock
