#include "mctcp/tx_node.hpp"

#include <algorithm>

#include "mctcp/error.hpp"

namespace mctcp::tx {

namespace {

constexpr double kTimeSlack = 1e-7;

}  // namespace

void TxParams::validate() const {
  if (initial_burst < 1) throw InvalidParameter("initial TX burst must be >= 1");
  if (!(emission_interval_s > 0.0)) throw InvalidParameter("emission interval must be > 0");
  if (max_total < 1) throw InvalidParameter("max TX total must be > 0");
}

std::string_view to_string(TxPhase p) {
  switch (p) {
    case TxPhase::Idle: return "idle";
    case TxPhase::WaitForSync: return "wait_for_sync";
    case TxPhase::SignalDetected: return "signal_detected";
    case TxPhase::Decoding: return "decoding";
    case TxPhase::Emitting: return "emitting";
  }
  return "?";
}

TxPhase TxState::phase() const {
  if (emitting) return TxPhase::Emitting;
  switch (sync.phase) {
    case codec::SyncPhase::WaitForSync:
      return last_count > 0 ? TxPhase::WaitForSync : TxPhase::Idle;
    case codec::SyncPhase::SignalDetected: return TxPhase::SignalDetected;
    case codec::SyncPhase::Synchronized: return TxPhase::Decoding;
  }
  return TxPhase::Idle;
}

codec::MessageSet expected_messages(TxPhase phase) {
  if (phase == TxPhase::Emitting) return {codec::Message::Halve, codec::Message::Stop};
  return {codec::Message::Start};
}

namespace {

void on_message(TxState& s, codec::Message m, double t, const TxParams& params) {
  switch (m) {
    case codec::Message::Start:
      s.emitting = true;
      s.current_burst = params.initial_burst;
      s.total_emitted = 0;
      s.next_emission = t + params.emission_interval_s;
      break;
    case codec::Message::Halve:
      s.current_burst = std::max<std::int64_t>(1, s.current_burst / 2);
      break;
    case codec::Message::Stop:
      s.emitting = false;
      break;
  }
}

void run_decoder(TxState& s, TxStep& out, double t, const TxParams& params,
                 const codec::CodecParams& codec) {
  using codec::SyncPhase;
  if (s.sync.phase == SyncPhase::WaitForSync) {
    const auto step = codec::sync_step(s.sync, t, s.last_count, codec);
    s.sync = step.state;
    if (s.sync.phase == SyncPhase::SignalDetected) s.next_sample = t + codec.sample_period_s();
    return;
  }
  if (s.sync.phase == SyncPhase::SignalDetected) {
    if (t + kTimeSlack < s.next_sample) return;
    s.next_sample += codec.sample_period_s();
    const auto step = codec::sync_step(s.sync, t, s.last_count, codec);
    s.sync = step.state;
    if (!step.synchronized) return;
    out.synchronized = true;
    // The detected rise is the leading 1 shared by every codeword.
    s.decoder = codec::DecoderState{};
    const auto first = codec::decode_step(s.decoder, 1, expected_messages(s.phase()), codec);
    s.decoder = first.state;
    s.decoder.next_read = s.sync.t_sync + codec.symbol_time_s;
  }
  while (s.sync.phase == SyncPhase::Synchronized && t + kTimeSlack >= s.decoder.next_read) {
    const int symbol = s.last_count >= codec.detection_threshold ? 1 : 0;
    out.symbol = symbol;
    const auto step = codec::decode_step(s.decoder, symbol, expected_messages(s.phase()), codec);
    s.decoder = step.state;
    if (step.message || step.sync_lost) {
      s.sync = codec::SyncState{};
      out.sync_lost = step.sync_lost;
      if (step.message) {
        out.decoded = step.message;
        on_message(s, *step.message, t, params);
      }
      return;
    }
    s.decoder.next_read += codec.symbol_time_s;
  }
}

}  // namespace

TxStep tx_step(TxState& s, double t, std::span<const double> r_arrivals, const TxParams& params,
               const codec::CodecParams& codec) {
  TxStep out;
  for (double a : r_arrivals) s.window.push(a);
  s.last_count = s.window.count(t);
  run_decoder(s, out, t, params, codec);

  if (s.emitting && t + kTimeSlack >= s.next_emission) {
    out.emit = std::min(s.current_burst, params.max_total - s.total_emitted);
    s.total_emitted += out.emit;
    s.current_burst += params.initial_burst;
    s.next_emission += params.emission_interval_s;
    if (s.total_emitted >= params.max_total) {
      s.emitting = false;
      out.reached_cap = true;
    }
  }
  return out;
}

}  // namespace mctcp::tx
