#pragma once

#include <cstdint>
#include <random>

namespace pg {

// Deterministic random stream. Wraps mt19937_64 but generates uniform and
// normal variates with a fixed algorithm, so sequences do not depend on the
// standard library's distribution implementations and are reproducible
// bit-for-bit across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), rejection sampled to kill modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  double normal(double mean, double std) { return mean + std * normal(); }

  // Seed for an independent substream of a run (splitmix64-style mixing).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pg
