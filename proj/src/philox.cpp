#include "ym/philox.hpp"

namespace ym {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Philox4x32::Counter round(const Philox4x32::Counter& c,
                                 const Philox4x32::Key& k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c[0], hi0, lo0);
  mulhilo(kMul1, c[2], hi1, lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

namespace {

inline Philox4x32::Counter draw_block(std::uint64_t seed, std::uint64_t index,
                                      std::uint32_t block) {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32),
                                   block, 0u};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
  return Philox4x32::block(ctr, key);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

double CounterStream::uniform(std::uint64_t index, std::uint32_t lane) const {
  const auto out = draw_block(seed_, index, lane / 2);
  const std::uint32_t half = (lane % 2) * 2;
  return to_unit(out[half], out[half + 1]);
}

void CounterStream::uniforms(std::uint64_t index, std::span<double> out) const {
  for (std::size_t lane = 0; lane < out.size(); lane += 2) {
    const auto b = draw_block(seed_, index, static_cast<std::uint32_t>(lane / 2));
    out[lane] = to_unit(b[0], b[1]);
    if (lane + 1 < out.size()) out[lane + 1] = to_unit(b[2], b[3]);
  }
}

}  // namespace ym
