#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace signbias {

/// SplitMix64 step. Used only to expand a 64-bit seed into generator state.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent sub-stream seed from a parent seed and a stream
/// name ("gen", "augment", "sampler", "init", ...) plus an optional index.
/// The name is hashed with 64-bit FNV-1a; the result is mixed through
/// SplitMix64 so nearby parents and indices decorrelate.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view stream,
                          std::uint64_t index = 0) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna), seeded by four SplitMix64 outputs.
///
/// The whole toolkit draws randomness only through this class so that index
/// streams, generated datasets and training runs are reproducible bit-for-bit
/// across platforms and standard libraries. Derived distributions are defined
/// here too, because the <random> distributions are implementation-specific:
///   uniform()      = (next() >> 11) * 2^-53, in [0, 1)
///   uniform(a, b)  = a + (b - a) * uniform()
///   below(n)       = Lemire's nearly-divisionless bounded integer
///   normal()       = Box-Muller (cosine branch only, no cached second value),
///                    u1 = 1 - uniform() so log never sees 0
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type next() noexcept;
  result_type operator()() noexcept { return next(); }

  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
  double laplace(double scale) noexcept;

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace signbias
