#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mctcp/channel/physics.hpp"

namespace mctcp::channel {

struct ChannelStats;

/// P(X >= threshold) for X ~ Binomial(q, p_hit): the chance that a burst of
/// `q` molecules yields at least `threshold` assimilations in the symbol
/// window. Summed exactly in log space; no normal approximation.
double p_correct_symbol(std::int64_t q, double p_hit, std::int64_t threshold);

/// Piecewise-linear window mass over distance, clamped outside the anchors.
class WindowMassTable {
 public:
  WindowMassTable() = default;
  /// Anchors are (distance in metres, window mass) pairs, any order.
  explicit WindowMassTable(std::vector<std::pair<double, double>> anchors);

  /// Reference anchors: 0.889 at 26.5 um and 0.6613 at 61.9 um.
  static WindowMassTable reference();
  /// One anchor per calibrated distance of `stats` that matches `species`.
  static WindowMassTable from_stats(std::span<const ChannelStats> stats, Species species);

  double at(double distance_m) const;
  const std::vector<std::pair<double, double>>& anchors() const { return anchors_; }

 private:
  std::vector<std::pair<double, double>> anchors_;
};

/// Everything needed to predict the symbol success probability at a node.
struct ReliabilityModel {
  NodeGeometry receiver;        // the node absorbing the burst (TX for R)
  GammaFit fit;
  std::int64_t threshold = 34;  // zeta_S
  WindowMassTable window_mass = WindowMassTable::reference();

  /// p_assim(d) * window_mass(d).
  double p_hit(double distance_m) const;
};

/// Smallest multiple of `increment` whose symbol success probability reaches
/// `target_pc`. Throws OutOfRange when `max_multiples * increment` is not
/// enough, InvalidParameter for a target outside (0, 1).
std::int64_t min_burst_for_reliability(const ReliabilityModel& model, double distance_m,
                                       double target_pc, std::int64_t increment,
                                       int max_multiples);

}  // namespace mctcp::channel
