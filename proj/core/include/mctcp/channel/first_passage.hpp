#pragma once

#include <vector>

#include "mctcp/rng.hpp"

namespace mctcp::channel {

/// Exit time of 3-D Brownian motion started at the centre of a ball.
///
/// In reduced time s = D t / rho^2 the survival function is
///   S(s) = 2 sum_{n>=1} (-1)^(n+1) exp(-n^2 pi^2 s),
/// with mean 1/6. The sampler tabulates S on a uniform grid and inverts it by
/// interpolation; beyond the grid the single-exponential tail is inverted
/// exactly.
class SphereExitSampler {
 public:
  explicit SphereExitSampler(int grid_points = 8192, double s_max = 2.0);

  /// Reduced exit time s.
  double sample_reduced(Rng& rng) const;
  /// Exit time in seconds from a ball of `radius_m` with diffusivity `d`.
  double sample(double radius_m, double diffusivity, Rng& rng) const {
    return sample_reduced(rng) * radius_m * radius_m / diffusivity;
  }

  /// Series evaluation of S(s); exposed for tests.
  static double survival(double s);

 private:
  double s_max_;
  double ds_;
  double tail_survival_;
  std::vector<double> survival_;  // decreasing in s
};

}  // namespace mctcp::channel
