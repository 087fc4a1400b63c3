#pragma once

#include <cstdint>
#include <string_view>

namespace anykernel {

// SplitMix64 in counter mode: every draw is a pure function of (seed, stream, counter),
// so replaying round t never depends on how many draws earlier rounds consumed.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t bits(std::uint64_t counter) const;
  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t key_ = 0;
};

// Sequential cursor over a CounterRng for simulators that draw a variable number of values.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::string_view stream) : rng_(seed, stream) {}

  void seek(std::uint64_t counter) { next_ = counter; }
  std::uint64_t position() const { return next_; }

  std::uint64_t bits() { return rng_.bits(next_++); }
  double uniform() { return rng_.uniform(next_++); }
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace anykernel
