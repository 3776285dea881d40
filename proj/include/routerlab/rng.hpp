// rng.hpp
// Deterministic 64-bit RNG for the stochastic router.
//
// SplitMix64 is the base stream. Independent streams are derived by
// hashing: derive_stream(seed, i) = mix64(seed ^ mix64(i + GOLDEN)),
// so ensemble run i always sees the same stream regardless of the
// execution schedule.
#ifndef ROUTERLAB_RNG_HPP
#define ROUTERLAB_RNG_HPP

#include <cstdint>

namespace routerlab {

/// SplitMix64 finalizer; also used as the stream-derivation hash.
std::uint64_t mix64(std::uint64_t x);

/// Stream seed for sub-stream `index` of master `seed`.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

  private:
    std::uint64_t state_;
};

/// Binomial(n, p) variate. Inversion for small n*p, the BTRS
/// transformed-rejection sampler (Hormann 1993) otherwise, so the cost
/// is O(1) in n.
std::uint64_t binomial(SplitMix64& rng, std::uint64_t n, double p);

}  // namespace routerlab

#endif
