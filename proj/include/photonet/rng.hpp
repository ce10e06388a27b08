#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace photonet {

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and a key. Stable
/// across platforms and runs (FNV-1a over the key, then splitmix finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

/// Seeded generator with platform-independent draws. std::mt19937_64's output
/// sequence is fixed by the standard but the std distributions are not, so
/// all bounded draws are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace photonet
