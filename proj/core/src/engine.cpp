#include "mctcp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mctcp/channel/particle_engine.hpp"
#include "mctcp/channel/statistical_channel.hpp"
#include "mctcp/error.hpp"
#include "mctcp/rng.hpp"

#ifndef MCTCP_INSTALL_DATA_DIR
#define MCTCP_INSTALL_DATA_DIR ""
#endif
#ifndef MCTCP_SOURCE_DATA_DIR
#define MCTCP_SOURCE_DATA_DIR "data"
#endif

namespace mctcp::engine {

using nlohmann::json;
using channel::Species;

std::string_view to_string(ChannelMode m) {
  return m == ChannelMode::Particle ? "particle" : "statistical";
}

ChannelMode channel_mode_from_string(std::string_view s) {
  if (s == "statistical") return ChannelMode::Statistical;
  if (s == "particle") return ChannelMode::Particle;
  throw InvalidParameter("unknown channel mode '" + std::string(s) + "'");
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Completed: return "completed";
    case SessionStatus::StopUndecoded: return "stop_undecoded";
    case SessionStatus::AttemptsExhausted: return "attempts_exhausted";
    case SessionStatus::Timeout: return "timeout";
  }
  return "?";
}

namespace {

void require_tick_multiple(double value, double tick, const char* name) {
  const double ratio = value / tick;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * std::max(1.0, ratio) || ratio < 0.5) {
    throw InvalidParameter(std::string(name) + " must be a whole number of engine ticks");
  }
}

}  // namespace

std::vector<std::string> SimConfig::validate() const {
  medium.validate();
  s_species.validate();
  r_species.validate();
  tx_geometry.validate();
  rx_geometry.validate();
  fit.validate();
  codec.validate();
  tx.validate();
  rx.validate();
  if (!(distance_m > 0.0)) throw InvalidParameter("distance must be > 0");
  if (distance_m < tx_geometry.node_radius_m + rx_geometry.node_radius_m) {
    throw InvalidGeometry("TX and RX overlap at this distance");
  }
  if (!(tick_s > 0.0)) throw InvalidParameter("tick must be > 0");
  require_tick_multiple(codec.symbol_time_s, tick_s, "symbol time");
  require_tick_multiple(codec.sample_period_s(), tick_s, "sync sampling period");
  require_tick_multiple(tx.emission_interval_s, tick_s, "emission interval");
  require_tick_multiple(rx.control_period_s, tick_s, "control period");
  if (!(max_sim_time_s > rx.attempt_timeout_s * rx.max_attempts)) {
    throw InvalidParameter("max_sim_time must exceed timeout_rx * C_a,max");
  }
  if (!(drain_s >= 0.0)) throw InvalidParameter("drain time must be >= 0");
  if (!(stimulus_time_s >= 0.0)) throw InvalidParameter("stimulus time must be >= 0");
  if (!(p_capture_tx >= 0.0 && p_capture_tx <= 1.0) ||
      !(p_capture_rx >= 0.0 && p_capture_rx <= 1.0)) {
    throw InvalidParameter("p_capture must lie in [0, 1]");
  }
  if (!(cull_factor > 1.0)) throw InvalidParameter("cull factor must be > 1");
  std::vector<std::string> warnings;
  if (distance_m < 20e-6 || distance_m > 70e-6) {
    warnings.push_back("distance " + std::to_string(distance_m * 1e6) +
                       " um is outside the 20-70 um range the protocol was tuned for");
  }
  return warnings;
}

void EventLog::add(double t, std::string_view node, std::string_view kind, std::string data) {
  events_.push_back({t, std::string(node), std::string(kind), std::move(data)});
}

std::string EventLog::to_ndjson() const {
  std::string out;
  for (const auto& e : events_) {
    nlohmann::ordered_json line{
        {"t_s", e.t_s}, {"node", e.node}, {"kind", e.kind}, {"data", json::parse(e.data)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

void EventLog::write_ndjson(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  out << to_ndjson();
}

std::string to_json(const SessionSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json codewords{{"START", s.codec.start}, {"HALVE", s.codec.halve}, {"STOP", s.codec.stop}};
  json j{{"schema_version", 1},
         {"distance_um", s.distance_m * 1e6},
         {"seed", s.seed},
         {"channel_mode", std::string(to_string(s.channel_mode))},
         {"status", std::string(to_string(s.status))},
         {"zeta_stop", s.stop_target},
         {"b0_rx", s.b0_rx},
         {"attempts", s.attempts},
         {"halve_count", s.halve_count},
         {"s_emitted", s.s_emitted},
         {"r_emitted", s.r_emitted},
         {"s_delivered", s.s_delivered},
         {"s_at_stop", s.s_at_stop},
         {"stop_estimated", s.stop_estimated},
         {"attempt_start_s", opt(s.attempt_start)},
         {"established_at_s", opt(s.established_at)},
         {"rtt_s", opt(s.rtt)},
         {"stop_sent_at_s", opt(s.stop_sent_at)},
         {"stop_decoded_at_s", opt(s.stop_decoded_at)},
         {"end_time_s", s.end_time},
         {"s_lost", s.s_lost},
         {"s_in_flight", s.s_in_flight},
         {"r_delivered", s.r_delivered},
         {"r_lost", s.r_lost},
         {"r_in_flight", s.r_in_flight},
         {"symbol_time_s", s.codec.symbol_time_s},
         {"zeta_s", s.codec.detection_threshold},
         {"codewords", codewords},
         {"warnings", s.warnings}};
  return j.dump(1);
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("MCTCP_DATA_DIR"); env && *env) return env;
  const std::filesystem::path installed = MCTCP_INSTALL_DATA_DIR;
  std::error_code ec;
  if (!installed.empty() && std::filesystem::exists(installed / "channel", ec)) return installed;
  return MCTCP_SOURCE_DATA_DIR;
}

std::pair<channel::ChannelStats, channel::ChannelStats> resolve_channel_stats(
    const SimConfig& config, const channel::ChannelStatsSet* stats) {
  const double d = config.distance_m;
  if (!stats && config.channel_stats == "analytic") {
    const double ds = channel::diffusion_coefficient(config.medium, config.s_species);
    const double dr = channel::diffusion_coefficient(config.medium, config.r_species);
    return {channel::analytic_channel_stats(Species::S, d, ds, config.rx_geometry, config.fit,
                                            config.codec.symbol_time_s),
            channel::analytic_channel_stats(Species::R, d, dr, config.tx_geometry, config.fit,
                                            config.codec.symbol_time_s)};
  }
  channel::ChannelStatsSet loaded;
  if (!stats) {
    const std::filesystem::path path = config.channel_stats == "particle"
                                           ? data_dir() / "channel" / "particle.json"
                                           : std::filesystem::path(config.channel_stats);
    loaded = channel::ChannelStatsSet::load(path);
    stats = &loaded;
  }
  return {stats->find(Species::S, d), stats->find(Species::R, d)};
}

namespace {

std::unique_ptr<channel::ChannelModel> make_channel(const SimConfig& c,
                                                    const channel::ChannelStatsSet* stats) {
  if (c.channel_mode == ChannelMode::Particle) {
    channel::ParticleChannelParams p;
    p.medium = c.medium;
    p.s_species = c.s_species;
    p.r_species = c.r_species;
    p.tx = c.tx_geometry;
    p.rx = c.rx_geometry;
    p.p_capture_tx = c.p_capture_tx;
    p.p_capture_rx = c.p_capture_rx;
    p.distance_m = c.distance_m;
    p.cull_factor = c.cull_factor;
    return std::make_unique<channel::ParticleChannel>(p, c.seed);
  }
  auto [s, r] = resolve_channel_stats(c, stats);
  return std::make_unique<channel::StatisticalChannel>(s, r, c.seed);
}

using MinHeap = std::priority_queue<double, std::vector<double>, std::greater<>>;

struct Flow {
  MinHeap pending;
  std::int64_t emitted = 0;
  std::int64_t delivered = 0;
  std::int64_t lost = 0;
  std::int64_t stranded = 0;

  void add(const channel::Delivery& d, std::int64_t count) {
    emitted += count;
    lost += d.lost;
    stranded += d.stranded;
    for (double t : d.arrival_times) pending.push(t);
  }
  std::int64_t in_flight() const { return static_cast<std::int64_t>(pending.size()) + stranded; }
  bool balanced() const { return emitted == delivered + lost + in_flight(); }
};

std::string obj(const json& fields) { return fields.dump(); }

}  // namespace

RunResult run(const SimConfig& config, const channel::ChannelStatsSet* stats) {
  RunResult result;
  SessionSummary& sum = result.summary;
  sum.warnings = config.validate();
  sum.distance_m = config.distance_m;
  sum.seed = config.seed;
  sum.channel_mode = config.channel_mode;
  sum.stop_target = config.rx.stop_target;
  sum.b0_rx = config.rx.initial_burst;
  sum.codec = config.codec;

  auto chan = make_channel(config, stats);
  EventLog& log = result.log;
  const bool rec = config.record_events;
  const double tick = config.tick_s;
  const double horizon = config.max_sim_time_s;
  const auto max_ticks = static_cast<std::int64_t>(std::llround(horizon / tick));
  const auto stimulus_tick = static_cast<std::int64_t>(std::llround(config.stimulus_time_s / tick));
  const auto drain_ticks = static_cast<std::int64_t>(std::llround(config.drain_s / tick));

  tx::TxState txs(config.codec);
  rx::RxState rxs;
  Flow s_flow;
  Flow r_flow;
  std::multimap<double, std::int64_t> r_schedule;
  std::vector<double> r_batch;
  bool started = false;
  std::optional<std::int64_t> drain_end;
  rx::RxPhase rx_prev = rxs.phase;
  tx::TxPhase tx_prev = txs.phase();
  double t = 0.0;

  for (std::int64_t k = 0; k <= max_ticks; ++k) {
    t = static_cast<double>(k) * tick;

    std::int64_t s_new = 0;
    while (!s_flow.pending.empty() && s_flow.pending.top() <= t) {
      s_flow.pending.pop();
      ++s_new;
    }
    s_flow.delivered += s_new;
    r_batch.clear();
    while (!r_flow.pending.empty() && r_flow.pending.top() <= t) {
      r_batch.push_back(r_flow.pending.top());
      r_flow.pending.pop();
    }
    r_flow.delivered += static_cast<std::int64_t>(r_batch.size());
    if (rec && s_new > 0) log.add(t, "rx", "absorb", obj({{"species", "S"}, {"count", s_new}}));
    if (rec && !r_batch.empty()) {
      log.add(t, "tx", "absorb",
              obj({{"species", "R"}, {"count", static_cast<std::int64_t>(r_batch.size())}}));
    }

    // RX
    const bool stimulus = !started && k == stimulus_tick;
    started = started || stimulus;
    const rx::RxStep rstep = rx_step(rxs, t, s_new, stimulus, config.rx, config.codec);
    if (rstep.established) {
      sum.attempt_start = rxs.attempt_start;
      sum.established_at = rxs.established_at;
      sum.rtt = rxs.rtt;
      if (rec) log.add(t, "rx", "established", obj({{"rtt_s", rxs.rtt}, {"attempt", rxs.attempt}}));
    }
    if (rec && rstep.timed_out) log.add(t, "rx", "timeout", obj({{"attempt", rxs.attempt}}));
    if (rstep.send) {
      const auto& snd = *rstep.send;
      for (const auto& e : codec::encode_message(snd.message, snd.burst, config.codec)) {
        if (e.molecules > 0) r_schedule.emplace(snd.start + e.offset_s, e.molecules);
      }
      if (snd.message == codec::Message::Stop) {
        sum.stop_sent_at = t;
        sum.s_at_stop = rxs.total_assimilated;
        sum.stop_estimated = rxs.stop_estimate;
      }
      if (rec) {
        log.add(t, "rx", "command",
                obj({{"message", std::string(codec::to_string(snd.message))},
                     {"burst", snd.burst},
                     {"N", rxs.total_assimilated},
                     {"estimated", rxs.stop_estimate || rxs.halve_estimate}}));
      }
    }
    if (rec && rxs.phase != rx_prev) {
      log.add(t, "rx", "state_change",
              obj({{"from", std::string(to_string(rx_prev))},
                   {"to", std::string(to_string(rxs.phase))}}));
    }
    rx_prev = rxs.phase;

    // TX
    if (config.tx_present) {
      const tx::TxStep tstep = tx_step(txs, t, r_batch, config.tx, config.codec);
      if (rec && tstep.synchronized) {
        log.add(t, "tx", "synchronized",
                obj({{"t_star", txs.sync.t_star}, {"t_sync", txs.sync.t_sync}}));
      }
      if (rec && tstep.symbol) log.add(t, "tx", "symbol", obj({{"value", *tstep.symbol}}));
      if (rec && tstep.sync_lost) log.add(t, "tx", "sync_lost");
      if (tstep.decoded) {
        if (*tstep.decoded == codec::Message::Stop && !sum.stop_decoded_at) sum.stop_decoded_at = t;
        if (rec) {
          log.add(t, "tx", "decode",
                  obj({{"message", std::string(codec::to_string(*tstep.decoded))}}));
        }
      }
      if (tstep.emit > 0) {
        s_flow.add(chan->transmit(Species::S, tstep.emit, t, horizon), tstep.emit);
        if (rec) log.add(t, "tx", "emit", obj({{"species", "S"}, {"count", tstep.emit}}));
      }
      if (rec && tstep.reached_cap) log.add(t, "tx", "cap_reached");
      if (rec && txs.phase() != tx_prev) {
        log.add(t, "tx", "state_change",
                obj({{"from", std::string(to_string(tx_prev))},
                     {"to", std::string(to_string(txs.phase()))}}));
      }
      tx_prev = txs.phase();
    }

    // Scheduled R bursts.
    while (!r_schedule.empty() && r_schedule.begin()->first <= t + 0.5 * tick) {
      const std::int64_t n = r_schedule.begin()->second;
      r_schedule.erase(r_schedule.begin());
      if (config.tx_present) {
        r_flow.add(chan->transmit(Species::R, n, t, horizon), n);
      } else {
        r_flow.emitted += n;
        r_flow.lost += n;
      }
      if (rec) log.add(t, "rx", "emit", obj({{"species", "R"}, {"count", n}}));
    }

    if (!s_flow.balanced() || !r_flow.balanced()) {
      throw std::logic_error("molecule bookkeeping out of balance");
    }

    const bool quiet = started && rxs.phase == rx::RxPhase::Idle && !txs.emitting &&
                       r_schedule.empty();
    if (quiet && !drain_end) drain_end = k + drain_ticks;
    if (drain_end && k >= *drain_end) break;
  }

  sum.end_time = t;
  sum.attempts = rxs.attempt;
  sum.halve_count = rxs.halve_count;
  sum.s_emitted = s_flow.emitted;
  sum.r_emitted = r_flow.emitted;
  sum.s_delivered = s_flow.delivered;
  sum.s_lost = s_flow.lost;
  sum.s_in_flight = s_flow.in_flight();
  sum.r_delivered = r_flow.delivered;
  sum.r_lost = r_flow.lost;
  sum.r_in_flight = r_flow.in_flight();
  switch (rxs.outcome) {
    case rx::RxOutcome::Stopped:
      sum.status = sum.stop_decoded_at ? SessionStatus::Completed : SessionStatus::StopUndecoded;
      break;
    case rx::RxOutcome::AttemptsExhausted: sum.status = SessionStatus::AttemptsExhausted; break;
    case rx::RxOutcome::Pending: sum.status = SessionStatus::Timeout; break;
  }
  if (rec) log.add(t, "engine", "end", obj({{"status", std::string(to_string(sum.status))}}));
  return result;
}

std::vector<SweepEntry> sweep(std::span<const SimConfig> configs, int parallelism,
                              const channel::ChannelStatsSet* stats) {
  std::vector<SweepEntry> out(configs.size());
  auto work = [&](std::size_t i) {
    try {
      SimConfig c = configs[i];
      c.record_events = false;
      out[i].summary = run(c, stats).summary;
    } catch (const std::exception& e) {
      out[i].summary.distance_m = configs[i].distance_m;
      out[i].summary.seed = configs[i].seed;
      out[i].error = e.what();
    }
  };
  const auto workers = static_cast<std::size_t>(
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(parallelism, 1)), 1,
                              std::max<std::size_t>(configs.size(), 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < configs.size(); i = next++) work(i);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

std::vector<SimConfig> sweep_grid(const SimConfig& base, std::span<const double> distances_m,
                                  int replicates) {
  if (replicates < 1) throw InvalidParameter("replicates must be >= 1");
  std::vector<SimConfig> out;
  std::uint64_t index = 0;
  for (double d : distances_m) {
    for (int r = 0; r < replicates; ++r) {
      SimConfig c = base;
      c.distance_m = d;
      c.seed = derive_seed(base.seed, index++);
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace mctcp::engine
