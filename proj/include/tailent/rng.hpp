#pragma once

// Deterministic random number generation.  The generator is SplitMix64 used
// in counter mode: draw i from stream with key k is mix64(k + i * golden),
// so any draw can be reproduced from (key, index) alone and independent
// streams are obtained by deriving distinct keys.  This is what makes
// Monte Carlo runs bit-reproducible regardless of thread count: each unit of
// work owns a stream derived from (base_seed, work_index).

#include <cstdint>

namespace tailent::rng {

// Scrambles a 64-bit value (finalizer of SplitMix64).
std::uint64_t mix64(std::uint64_t x);

// Derives the key of substream `stream` from a base seed.  Used for
// replicate seeds, tie-breaking seeds and per-column streams.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t stream);

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  // Uniform strictly inside (0,1): (x >> 11 + 0.5) / 2^53, so 0 and 1 are
  // unreachable and quantile transforms never see an endpoint.
  double uniform();

  // Standard normal via the inverse cdf, one uniform per draw.
  double normal();

  // Exponential(1).
  double exponential();

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze (rejection; the number of
  // draws consumed is not fixed, but the sequence is still deterministic).
  double gamma(double shape);

  // Chi-squared with nu > 0 degrees of freedom.
  double chi_squared(double nu);

  // Positive alpha-stable S(alpha, 1) with Laplace transform exp(-t^alpha),
  // alpha in (0, 1], by the Chambers-Mallows-Stuck / Kanter construction
  // (exactly two uniforms).  alpha == 1 returns the degenerate unit mass.
  double positive_stable(double alpha);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tailent::rng
