#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fairmdp {

/// Seedable, splittable 64-bit generator.
///
/// The engine is std::mt19937_64 seeded through SplitMix64. Uniform doubles
/// take the top 53 bits of one engine draw, so every draw used by the library
/// is a fixed function of the seed (no dependence on standard-library
/// distribution internals, except gamma() which uses std::gamma_distribution).
/// split(k) derives an independent child stream without advancing the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  int uniform_int(int n);

  /// Index drawn from an (unnormalised is fine) nonnegative weight vector.
  int categorical(std::span<const double> weights);

  double gamma(double shape);

  Rng split(std::uint64_t stream) const;

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace fairmdp
