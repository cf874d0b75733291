#pragma once

#include <cstdint>

#include "ellax/common.hpp"

namespace ellax {

/// Deterministic counter-based generator (splitmix64 of seed ^ counter).
/// Reproducibility contract: the k-th draw for a given seed is identical
/// across platforms and across runs, independent of draw interleaving by
/// other generators.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        std::uint64_t z = seed_ ^ (counter_++ * 0x9E3779B97F4A7C15ULL);
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return double(z >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Complex with independent uniform real/imag parts in [lo, hi).
    cplx complex_uniform(double lo, double hi) {
        const double re = uniform(lo, hi);
        const double im = uniform(lo, hi);
        return {re, im};
    }

    std::uint64_t draws() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace ellax
