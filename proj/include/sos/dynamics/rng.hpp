#pragma once

#include <cmath>
#include <cstdint>

namespace sos::dynamics {

/// Reproducibility key of one replica: a run-wide seed and a per-replica stream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Counter-based generator: draw n of (seed, stream) is a fixed function of
/// (seed, stream, n), so replicas never share state and replays are exact.
/// Uniforms and exponentials are produced here rather than through <random>
/// distributions so that the bit pattern does not depend on the standard library.
class CounterRng {
 public:
  explicit CounterRng(RngSpec spec) noexcept : key_(mix(spec.seed ^ mix(spec.stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on (0, 1): never returns 0 or 1.
  double uniform() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sos::dynamics
