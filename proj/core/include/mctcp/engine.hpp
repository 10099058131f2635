#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/channel/physics.hpp"
#include "mctcp/codec.hpp"
#include "mctcp/rx_node.hpp"
#include "mctcp/tx_node.hpp"

namespace mctcp::engine {

enum class ChannelMode { Statistical, Particle };

std::string_view to_string(ChannelMode m);
ChannelMode channel_mode_from_string(std::string_view s);

struct SimConfig {
  double distance_m = 26.5e-6;
  ChannelMode channel_mode = ChannelMode::Statistical;
  /// Statistical mode: "analytic" (closed form, any distance), "particle"
  /// (bundled Monte Carlo tables) or a path to a ChannelStats file.
  std::string channel_stats = "analytic";

  channel::MediumParams medium;
  channel::SpeciesSpec s_species{channel::Species::S, 1.75e-9};
  channel::SpeciesSpec r_species{channel::Species::R, 3.5e-9};
  channel::NodeGeometry tx_geometry{2.5e-6, 10000, 4e-9, 200e-6};
  channel::NodeGeometry rx_geometry{2.5e-6, 10000, 8e-9, 200e-6};
  channel::GammaFit fit;
  double restitution = 0.9;  // accepted for completeness; collisions are not simulated

  codec::CodecParams codec;
  tx::TxParams tx;
  rx::RxParams rx;

  /// Particle mode: capture probability per surface contact.
  double p_capture_tx = 0.01141;  // R at TX
  double p_capture_rx = 0.01566;  // S at RX
  double cull_factor = 20.0;

  bool tx_present = true;
  std::uint64_t seed = 1;
  double max_sim_time_s = 2000.0;
  double tick_s = 1e-3;
  /// Time the run keeps delivering in-flight molecules after both nodes idle.
  double drain_s = 20.0;
  double stimulus_time_s = 0.0;
  bool record_events = true;

  /// Throws InvalidParameter / InvalidGeometry. Returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

struct Event {
  double t_s;
  std::string node;  // "tx", "rx" or "channel"
  std::string kind;
  std::string data;  // JSON object text
};

class EventLog {
 public:
  void add(double t, std::string_view node, std::string_view kind, std::string data = "{}");
  const std::vector<Event>& events() const { return events_; }
  std::string to_ndjson() const;
  void write_ndjson(const std::filesystem::path& path) const;

 private:
  std::vector<Event> events_;
};

enum class SessionStatus { Completed, StopUndecoded, AttemptsExhausted, Timeout };

std::string_view to_string(SessionStatus s);

struct SessionSummary {
  double distance_m = 0.0;
  std::uint64_t seed = 0;
  ChannelMode channel_mode = ChannelMode::Statistical;
  SessionStatus status = SessionStatus::Timeout;
  std::int64_t stop_target = 0;  // zeta_stop
  std::int64_t b0_rx = 0;
  int attempts = 0;                // C_a
  int halve_count = 0;             // n_halve
  std::int64_t s_emitted = 0;      // c_TX
  std::int64_t r_emitted = 0;
  std::int64_t s_delivered = 0;    // S assimilated at RX by the end of the run
  std::int64_t s_at_stop = 0;      // N(t) when STOP was sent
  bool stop_estimated = false;     // STOP came from E_stop rather than N >= zeta_stop
  std::optional<double> attempt_start;   // successful ranging attempt
  std::optional<double> established_at;  // t_zetaRTT
  std::optional<double> rtt;
  std::optional<double> stop_sent_at;
  std::optional<double> stop_decoded_at;  // at TX
  double end_time = 0.0;
  std::int64_t s_lost = 0;
  std::int64_t s_in_flight = 0;
  std::int64_t r_delivered = 0;
  std::int64_t r_lost = 0;
  std::int64_t r_in_flight = 0;
  codec::CodecParams codec;
  std::vector<std::string> warnings;

  bool completed() const { return status == SessionStatus::Completed; }
};

std::string to_json(const SessionSummary& s);

struct RunResult {
  EventLog log;
  SessionSummary summary;
};

/// Location of the bundled data directory (MCTCP_DATA_DIR overrides).
std::filesystem::path data_dir();

/// The (S at RX, R at TX) statistics a statistical-mode run would use.
/// Throws MissingCalibration when a table lacks the configured distance.
std::pair<channel::ChannelStats, channel::ChannelStats> resolve_channel_stats(
    const SimConfig& config, const channel::ChannelStatsSet* stats = nullptr);

/// Runs one session to completion: stimulus at the RX, ranging, transfer and
/// teardown, in ticks of config.tick_s. Deterministic for a given config.
/// `stats`, when given, replaces the table named by config.channel_stats.
RunResult run(const SimConfig& config, const channel::ChannelStatsSet* stats = nullptr);

struct SweepEntry {
  SessionSummary summary;
  std::optional<std::string> error;
};

/// Runs every config on up to `parallelism` threads. Results come back in
/// input order; a failing run is reported in its entry.
std::vector<SweepEntry> sweep(std::span<const SimConfig> configs, int parallelism,
                              const channel::ChannelStatsSet* stats = nullptr);

/// distances x replicates grid; run i (distance-major) gets seed
/// derive_seed(base.seed, i).
std::vector<SimConfig> sweep_grid(const SimConfig& base, std::span<const double> distances_m,
                                  int replicates);

}  // namespace mctcp::engine
