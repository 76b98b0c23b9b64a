/**
 * @file rng.cpp
 * @brief SplitMix64 chain seeding and Box-Muller sampling.
 */
#include "radsle/rng.hpp"

#include <cmath>

namespace radsle {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t label) {
  // Chain: advance the master state once, fold in the label, advance again.
  std::uint64_t s = master_seed;
  (void)splitmix64_next(s);
  s ^= 0xD1B54A32D192ED03ull * (label + 1);
  std::uint64_t out = splitmix64_next(s);
  (void)splitmix64_next(s);
  return out ^ splitmix64_next(s);
}

double GaussianStream::uniform() {
  // 53-bit mantissa; reject exact zero so logs stay finite.
  double u;
  do {
    u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  } while (u <= 0.0);
  return u;
}

double GaussianStream::gauss() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

} // namespace radsle
