#include "esnmor/rng.hpp"

#include <cmath>
#include <numbers>

namespace esnmor {

double Rng::uniform01() {
  // 53-bit mantissa, shifted into (0, 1] so log() below is always finite.
  return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection-free modulo is biased for huge spans; spans here are tiny
  // relative to 2^64 so the bias is far below statistical noise.
  return lo + static_cast<std::int64_t>(gen_() % span);
}

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace esnmor
