#pragma once

#include <cstdint>
#include <random>

namespace esnmor {

// Deterministic random stream used everywhere weights or signals are drawn.
//
// The generator is std::mt19937_64 and normal deviates come from a hand-rolled
// Box-Muller transform (two uniforms per pair, cosine branch first), so the
// stream is identical across standard libraries. std::normal_distribution is
// implementation-defined and would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in (0, 1].
  double uniform01();

  // Uniform double in [lo, hi].
  double uniform(double lo, double hi);

  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; deviates are produced in pairs and the
  // second one is cached.
  double normal();

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace esnmor
