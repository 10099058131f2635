#pragma once

#include <cstdint>
#include <vector>

#include "mctcp/channel/physics.hpp"

namespace mctcp::channel {

/// Fate of one released burst.
struct Delivery {
  /// Absolute assimilation times, unsorted; all lie in (t_emit, horizon].
  std::vector<double> arrival_times;
  /// Molecules that left the simulated volume or will never be assimilated.
  std::int64_t lost = 0;
  /// Molecules still diffusing at the horizon.
  std::int64_t stranded = 0;
};

/// Transport between the two nodes, as seen by the protocol engine.
class ChannelModel {
 public:
  virtual ~ChannelModel() = default;
  /// Releases `count` molecules of `species` from its emitter at `t_emit`.
  virtual Delivery transmit(Species species, std::int64_t count, double t_emit,
                            double horizon_s) = 0;
};

}  // namespace mctcp::channel
