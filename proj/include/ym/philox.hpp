#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace ym {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11), as in the
// Random123 library. A block is a pure function of (counter, key), so any
// element of a stream can be computed directly from its index.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

// Uniform doubles addressed by (seed, index, lane).
//
// Lane k of draw `index` comes from block k/2 of the counter
// {index_lo, index_hi, k/2, 0} under key {seed_lo, seed_hi}; the two 64-bit
// halves of the block give lanes 2j and 2j+1, mapped to [0,1) using their top
// 53 bits.
class CounterStream {
 public:
  static constexpr const char* kName = "philox4x32-10";
  static constexpr const char* kVersion = "ym-stream-1";

  explicit CounterStream(std::uint64_t seed) : seed_(seed) {}

  double uniform(std::uint64_t index, std::uint32_t lane) const;
  // Lanes 0..out.size()-1 of one draw; same values as repeated uniform().
  void uniforms(std::uint64_t index, std::span<double> out) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace ym
