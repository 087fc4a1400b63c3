#include "anykernel/rng.hpp"

#include <cmath>
#include <numbers>

namespace anykernel {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream))) {}

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream) : CounterRng(seed, fnv1a64(stream)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(key_ + counter * kGamma);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::index(std::uint64_t n) {
  if (n == 0) return 0;
  auto r = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return r < n ? r : n - 1;
}

}  // namespace anykernel
