#pragma once

#include <cstdint>

namespace blockprec {

// SplitMix64 (Steele/Lea/Flood). One 64-bit state word, trivially splittable:
// substream(seed, index) derives an independent stream from the pair, so
// parallel loops can give every work item its own stream and stay bitwise
// reproducible regardless of thread count or schedule.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  static RandomStream substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();

  // uniform on the open interval (0, 1); safe to feed to log/CDF inversion
  double next_uniform();

  // standard normal via Box-Muller; draws are generated in pairs
  double next_normal();

  // mean 1/rate exponential
  double next_exponential(double rate);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; also used to hash (seed, index) pairs into substream
// states.
std::uint64_t mix64(std::uint64_t x);

}  // namespace blockprec
