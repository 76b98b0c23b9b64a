/**
 * @file rng.hpp
 * @brief Deterministic seeded randomness: SplitMix64 seed derivation and a
 *        Box-Muller Gaussian stream with spare caching, one stream per curve.
 */
#pragma once

#include <cstdint>
#include <random>

namespace radsle {

/** One SplitMix64 step; also the documented seed-splitting function. */
std::uint64_t splitmix64_next(std::uint64_t& state);

/**
 * Derives an independent stream seed from (master_seed, label). Streams for
 * distinct labels are decorrelated by construction; permuting labels permutes
 * streams (the exchangeability contract).
 */
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t label);

/** Gaussian N(0,1) stream: mt19937_64 + explicit Box-Muller with a cached spare. */
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  /** Uniform double in the open interval (0, 1). */
  double uniform();

  /** Standard normal variate via Box-Muller; every other call reuses the spare. */
  double gauss();

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace radsle
