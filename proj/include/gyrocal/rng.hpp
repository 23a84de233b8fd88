#pragma once

#include <cstdint>
#include <random>

namespace gyrocal {

// Mixes seed words into a well-spread 64-bit state (splitmix64 finalizer), so
// streams derived from (master seed, truth index, trial index) are decorrelated
// and reproducible regardless of execution order.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t z = a;
  auto split = [](std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = s;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  z = split(z) ^ (b + 0x9e3779b97f4a7c15ULL);
  z = split(z) ^ (c + 0xbf58476d1ce4e5b9ULL);
  return split(z);
}

// One independent random stream. Each simulation trial owns its own.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t master, std::uint64_t truth_index, std::uint64_t trial_index)
      : engine_(mix_seed(master, truth_index, trial_index)) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double gaussian(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(engine_);
  }

  // +1 or -1 with equal probability.
  double sign() { return (engine_() & 1ULL) ? 1.0 : -1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gyrocal
