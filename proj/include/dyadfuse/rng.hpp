#pragma once

// Portable seeded randomness.
//
// std::mt19937_64 has a fully specified output sequence, but the standard
// distributions do not, so the variates below are derived from the raw 64-bit
// stream by fixed formulas. Seeds are derived hierarchically
// (run -> experiment -> fold -> bank) by mixing a parent seed with a stream id.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace dyadfuse {

/// SplitMix64 finalizer applied to (parent, stream).
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double low, double high) {
    return low + (high - low) * uniform();
  }
  /// Uniform integer on [0, n); n must be positive.
  std::size_t index(std::size_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();
  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dyadfuse
