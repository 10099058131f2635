#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "mctcp/codec.hpp"

namespace mctcp::tx {

struct TxParams {
  std::int64_t initial_burst = 1;     // B_0,TX
  double emission_interval_s = 0.02;  // delta t
  std::int64_t max_total = 5'000'000; // c_TX,max

  void validate() const;
};

enum class TxPhase { Idle, WaitForSync, SignalDetected, Decoding, Emitting };

std::string_view to_string(TxPhase p);

struct TxState {
  explicit TxState(const codec::CodecParams& codec) : window(codec.symbol_time_s) {}

  bool emitting = false;
  std::int64_t current_burst = 0;  // size of the next emission (b_TX)
  std::int64_t total_emitted = 0;  // c_TX for the running session
  double next_emission = 0.0;
  codec::SyncState sync;
  codec::DecoderState decoder;
  codec::AbsorptionWindow window;
  double next_sample = 0.0;
  /// Window count seen at the latest tick.
  std::int64_t last_count = 0;

  TxPhase phase() const;
};

struct TxStep {
  std::int64_t emit = 0;  // S molecules to release at this tick
  bool synchronized = false;
  bool sync_lost = false;
  std::optional<int> symbol;
  std::optional<codec::Message> decoded;
  bool reached_cap = false;
};

/// Messages the TX accepts in `phase`: START while not emitting, HALVE or
/// STOP while emitting.
codec::MessageSet expected_messages(TxPhase phase);

/// Advances the TX by one engine tick at time t. `r_arrivals` are the R
/// assimilations delivered at this tick (times <= t, non-decreasing).
TxStep tx_step(TxState& state, double t, std::span<const double> r_arrivals,
               const TxParams& params, const codec::CodecParams& codec);

}  // namespace mctcp::tx
