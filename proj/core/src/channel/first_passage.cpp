#include "mctcp/channel/first_passage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mctcp/error.hpp"

namespace mctcp::channel {

double SphereExitSampler::survival(double s) {
  if (s <= 0.0) return 1.0;
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  double sum = 0.0;
  for (int n = 1; n < 400; ++n) {
    const double term = std::exp(-static_cast<double>(n) * n * pi2 * s);
    sum += (n % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

SphereExitSampler::SphereExitSampler(int grid_points, double s_max) : s_max_(s_max) {
  if (grid_points < 16 || !(s_max > 0.5)) {
    throw InvalidParameter("SphereExitSampler: grid too coarse");
  }
  ds_ = s_max_ / (grid_points - 1);
  survival_.resize(static_cast<std::size_t>(grid_points));
  double floor = 1.0;
  for (int i = 0; i < grid_points; ++i) {
    // The alternating series loses digits for tiny s; enforce monotonicity.
    floor = std::min(floor, survival(i * ds_));
    survival_[static_cast<std::size_t>(i)] = floor;
  }
  tail_survival_ = survival_.back();
}

double SphereExitSampler::sample_reduced(Rng& rng) const {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double v = rng.uniform_open();
  if (v <= tail_survival_) return -std::log(v / 2.0) / pi2;
  // First index whose survival drops to v or below.
  const auto it = std::lower_bound(survival_.begin(), survival_.end(), v, std::greater<>());
  const auto i = static_cast<std::size_t>(it - survival_.begin());
  if (i == 0) return 0.0;
  const double hi = survival_[i - 1];
  const double lo = survival_[i];
  const double frac = hi > lo ? (hi - v) / (hi - lo) : 0.0;
  return (static_cast<double>(i - 1) + frac) * ds_;
}

}  // namespace mctcp::channel
