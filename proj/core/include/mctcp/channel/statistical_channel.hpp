#pragma once

#include <cstdint>
#include <vector>

#include "mctcp/channel/channel_model.hpp"
#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/rng.hpp"

namespace mctcp::channel {

/// Draws delays from a ChannelStats arrival histogram: a bin by inversion of
/// the cumulative counts, then a uniform offset inside the bin.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(const ChannelStats& stats);

  double sample(Rng& rng) const;
  /// Piecewise-linear CDF of the histogram.
  double cdf(double t) const;
  double p_assim() const { return p_assim_; }

 private:
  double p_assim_;
  double bin_width_;
  std::vector<double> cumulative_;  // normalised, cumulative_[i] = mass of bins [0, i]
};

/// k ~ Binomial(q, p_assim) assimilations, each with an independent delay.
/// Returned delays are relative to the release time, in draw order.
std::vector<double> statistical_transmit(std::int64_t q, const ArrivalSampler& sampler, Rng& rng);
std::vector<double> statistical_transmit(std::int64_t q, const ChannelStats& stats, Rng& rng);

/// Channel model backed by one ChannelStats per species.
class StatisticalChannel : public ChannelModel {
 public:
  StatisticalChannel(const ChannelStats& s_to_rx, const ChannelStats& r_to_tx, std::uint64_t seed);

  Delivery transmit(Species species, std::int64_t count, double t_emit,
                    double horizon_s) override;

 private:
  ArrivalSampler s_;
  ArrivalSampler r_;
  Rng rng_;
};

}  // namespace mctcp::channel
