#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace bcd4rec {

std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a; used for stream names and content hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// xoshiro256** generator. Streams are identified by (seed, name, index) so
/// independent consumers never share draws and any stream can be rebuilt from
/// its coordinates alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  static Rng stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  std::array<std::uint64_t, 4> state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace bcd4rec
