#pragma once

#include <cstdint>
#include <random>

#include "giniseq/math.hpp"

namespace giniseq {

// Seeded generator with a documented splitting scheme: substream(a, b)
// derives an independent stream from the root seed and two labels
// (e.g. replication index, stratum index), so serial and parallel runs
// produce bit-identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  Rng substream(std::uint64_t a, std::uint64_t b = 0) const {
    std::uint64_t derived = mix64(mix64(seed_ ^ mix64(a)) ^ mix64(b ^ 0x517cc1b727220a95ULL));
    return Rng(derived);
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace giniseq
