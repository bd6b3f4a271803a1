#pragma once

#include <cstdint>
#include <random>

namespace tvlad {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for an independent sub-stream. Pure function of (seed, stream), so any
/// replicate can be regenerated without replaying its predecessors.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Explicitly seeded random source. The engine is std::mt19937_64 (fully
/// specified by the standard); all variate transforms are implemented here so
/// draws are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Exponential with unit rate.
  double exponential();
  /// Student-t with nu degrees of freedom (Bailey's polar method).
  double student_t(double nu);
  /// Standard Cauchy.
  double cauchy();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tvlad
