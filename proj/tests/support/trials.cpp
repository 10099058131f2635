#include "trials.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mctcp/channel/statistical_channel.hpp"
#include "mctcp/rng.hpp"
#include "mctcp/tx_node.hpp"

namespace mctcp::testing {

DecodeTrial decode_trial(codec::Message message, std::int64_t burst,
                         const channel::ChannelStats& r_stats, const codec::CodecParams& codec,
                         std::uint64_t seed) {
  constexpr double tick = 1e-3;
  constexpr double t0 = 1.0;
  Rng rng(seed);
  const channel::ArrivalSampler sampler(r_stats);
  std::vector<double> arrivals;
  for (const auto& e : codec::encode_message(message, burst, codec)) {
    for (double dly : channel::statistical_transmit(e.molecules, sampler, rng)) {
      arrivals.push_back(t0 + e.offset_s + dly);
    }
  }
  std::sort(arrivals.begin(), arrivals.end());

  tx::TxParams params;
  tx::TxState state(codec);
  if (message != codec::Message::Start) {
    state.emitting = true;
    state.current_burst = 1;
    state.next_emission = 1e18;
  }
  const auto expected = tx::expected_messages(state.phase());
  const double end = t0 + codec.symbol_count(message) * codec.symbol_time_s + 4 * codec.symbol_time_s;
  const auto ticks = static_cast<std::int64_t>(std::llround(end / tick));

  DecodeTrial out;
  std::size_t next = 0;
  std::vector<double> batch;
  for (std::int64_t k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * tick;
    batch.clear();
    while (next < arrivals.size() && arrivals[next] <= t) batch.push_back(arrivals[next++]);
    const auto step = tx::tx_step(state, t, batch, params, codec);
    if (step.synchronized && state.sync.t_sync - state.sync.t_star > codec.symbol_time_s) {
      out.sync_within_symbol = false;
    }
    if (step.decoded) {
      if (!expected.contains(*step.decoded)) out.outside_expected = true;
      out.decoded = step.decoded;
      break;
    }
  }
  return out;
}

}  // namespace mctcp::testing
