#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gpsearch {

/// Deterministic RNG used everywhere randomness is needed. Uniform and normal
/// draws are generated with explicit transforms (not std::*_distribution) so
/// that a given seed produces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform();

  /// Standard normal via Box-Muller; consumes two uniform draws per value.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Splits one master seed into independent per-component seeds:
/// derived = splitmix64(master ^ fnv1a64(component_name)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view component);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gpsearch
