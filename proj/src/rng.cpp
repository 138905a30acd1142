#include "blockprec/rng.hpp"

#include <cmath>

namespace blockprec {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

RandomStream RandomStream::substream(std::uint64_t seed, std::uint64_t index) {
  // two finalizer rounds over the combined words; distinct (seed, index)
  // pairs land on distinct, well-separated states
  std::uint64_t s = mix64(seed + 0x9E3779B97F4A7C15ull);
  s = mix64(s ^ mix64(index + 0x632BE59BD9B4E019ull));
  return RandomStream(s);
}

std::uint64_t RandomStream::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  return mix64(state_);
}

double RandomStream::next_uniform() {
  // 53 random bits, shifted into (0,1) strictly
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double RandomStream::next_exponential(double rate) {
  return -std::log(next_uniform()) / rate;
}

}  // namespace blockprec
