#pragma once

#include <cstdint>
#include <random>

namespace mctcp {

/// Seeded random stream used by every stochastic component.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here rather than taken from
/// <random>, because the standard leaves those implementation-defined; this
/// keeps a given seed reproducible across compilers and platforms.
///
/// Algorithms (stream format version 1):
///   uniform()   top 53 bits of one engine draw, scaled to [0, 1)
///   normal()    Marsaglia polar method, spare value cached
///   binomial()  exact inversion; sequential from 0 when n*p < 30, otherwise
///               a search outward from the mode in order of decreasing mass
class Rng {
 public:
  static constexpr int kStreamVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal();
  std::int64_t binomial(std::int64_t n, double p);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finaliser; stable mapping used to derive independent sub-seeds.
std::uint64_t mix64(std::uint64_t x);

/// Sub-seed for worker/run `index` under `master`: mix64(master ^ mix64(index + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace mctcp
