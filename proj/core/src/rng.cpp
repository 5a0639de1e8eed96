#include "lcoal/rng.hpp"

#include <cmath>
#include <limits>

#include "lcoal/errors.hpp"

namespace lcoal {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& c,
                       const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    if (r != 9) {
      key[0] += kW0;
      key[1] += kW1;
    }
  }
  return counter;
}

Stream::Stream(std::uint64_t seed, std::uint32_t replicate, Lane lane)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      replicate_(replicate),
      lane_(static_cast<std::uint32_t>(lane)) {}

void Stream::refill() {
  buf_ = philox4x32({static_cast<std::uint32_t>(block_),
                     static_cast<std::uint32_t>(block_ >> 32), replicate_,
                     lane_},
                    key_);
  ++block_;
  pos_ = 0;
}

std::uint32_t Stream::next_u32() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

std::uint64_t Stream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Stream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Stream::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Stream::below: n must be >= 1");
  const std::uint64_t limit =
      (std::numeric_limits<std::uint64_t>::max() / n) * n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double Stream::exponential(double rate) {
  if (!(rate > 0)) throw DomainError("Stream::exponential: rate must be > 0");
  return -std::log(1.0 - next_double()) / rate;
}

std::uint64_t Stream::poisson(double mean) {
  if (mean < 0 || !std::isfinite(mean))
    throw DomainError("Stream::poisson: mean must be finite and >= 0");
  if (mean > 1e6)
    throw DomainError("Stream::poisson: mean above the desk-scale guard (1e6)");
  if (mean == 0) return 0;
  std::uint64_t count = 0;
  double acc = exponential(1.0);
  while (acc <= mean) {
    ++count;
    acc += exponential(1.0);
  }
  return count;
}

}
