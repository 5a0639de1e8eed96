#pragma once

#include <array>
#include <cstdint>

namespace lcoal {

// Philox-4x32-10 block function (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3", SC 2011). Pure: one 128-bit counter and a 64-bit key
// produce four 32-bit words. Known-answer vectors are pinned in the tests,
// so outputs are a cross-platform reproducibility contract.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stream lanes. Part of the reproducibility contract: renumbering changes
// every seeded output.
enum class Lane : std::uint32_t {
  chain_events = 0,    // waiting times, merger sizes, subset choices
  poisson_points = 1,  // Poisson counts, event times, marks
  composition_u = 2,   // per-event uniform locations of simple bridges
  paintbox_v = 3,      // paintbox uniforms; re-created to replay the same V's
  misc = 4,
};

// Counter-based uniform stream. The split is by counter layout, not by state
// evolution: key = root seed, counter = (block_lo, block_hi, replicate, lane).
// Distinct (seed, replicate, lane) triples index disjoint counter ranges and
// are therefore independent streams that can be created in any order.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint32_t replicate, Lane lane);

  std::uint32_t next_u32();
  std::uint64_t next_u64();  // two consecutive words, first is the high half

  // Uniform on [0,1), 53-bit mantissa; 1.0 is never returned.
  double next_double();

  // Uniform integer on [0, n), unbiased (rejection); n >= 1.
  std::uint64_t below(std::uint64_t n);

  double exponential(double rate);

  // Exact Poisson draw by counting unit-exponential arrivals; O(mean).
  // Guarded against absurd means, this is a desk-scale simulator.
  std::uint64_t poisson(double mean);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t replicate_;
  std::uint32_t lane_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;  // buffer exhausted, refill on first use
};

}
