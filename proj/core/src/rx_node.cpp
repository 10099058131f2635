#include "mctcp/rx_node.hpp"

#include <algorithm>
#include <cmath>

#include "mctcp/error.hpp"

namespace mctcp::rx {

namespace {

constexpr double kTimeSlack = 1e-7;

}  // namespace

void RxParams::validate() const {
  if (initial_burst < 1) throw InvalidParameter("initial RX burst must be >= 1");
  if (max_attempts < 1) throw InvalidParameter("max attempts must be >= 1");
  if (!(attempt_timeout_s > 0.0)) throw InvalidParameter("attempt timeout must be > 0");
  if (!(control_period_s > 0.0)) throw InvalidParameter("control period must be > 0");
  if (!(tolerance > 0.0 && tolerance <= 1.0)) throw InvalidParameter("beta must lie in (0, 1]");
  if (!(growth_order > 0.0)) throw InvalidParameter("alpha must be > 0");
  if (rtt_threshold < 1) throw InvalidParameter("zeta_RTT must be >= 1");
  if (!(rtt_threshold <= halve_threshold && halve_threshold <= stop_target)) {
    throw InvalidParameter("thresholds must satisfy zeta_RTT <= zeta_halve <= zeta_stop");
  }
}

std::string_view to_string(RxPhase p) {
  switch (p) {
    case RxPhase::Idle: return "idle";
    case RxPhase::ConnectionSetup: return "connection_setup";
    case RxPhase::ConnectionEstablished: return "connection_established";
    case RxPhase::ConnectionRelease: return "connection_release";
  }
  return "?";
}

double estimate_rtt(double start_tx_end, double t_threshold) {
  if (!(t_threshold > start_tx_end)) {
    throw InvalidParameter("RTT threshold time must follow the START transmission");
  }
  return t_threshold - start_tx_end;
}

namespace {

Send send(RxState& s, codec::Message m, double t, const codec::CodecParams& codec) {
  s.r_emitted += s.current_burst * static_cast<std::int64_t>(
                                       std::count(codec.codeword(m).begin(),
                                                  codec.codeword(m).end(), '1'));
  s.last_send_end = t + codec.symbol_count(m) * codec.symbol_time_s;
  return {m, s.current_burst, t};
}

void start_attempt(RxState& s, RxStep& out, double t, const RxParams& params,
                   const codec::CodecParams& codec) {
  s.current_burst = s.attempt * params.initial_burst;
  s.attempt_start = t;
  s.start_zero_slot = t + (codec.symbol_count(codec::Message::Start) - 1) * codec.symbol_time_s;
  out.send = send(s, codec::Message::Start, t, codec);
  s.attempt_deadline = s.last_send_end + params.attempt_timeout_s;
}

}  // namespace

std::optional<codec::Message> control_tick(RxState& s, double t, const RxParams& params,
                                           const codec::CodecParams& codec) {
  s.stop_estimate = false;
  s.halve_estimate = false;
  if (s.anchor_pending || t <= s.halve_anchor_time + kTimeSlack) return std::nullopt;
  if (t + kTimeSlack < s.last_send_end) return std::nullopt;

  const auto n = static_cast<double>(s.total_assimilated);
  if (s.total_assimilated >= params.stop_target) return codec::Message::Stop;

  const double alpha = params.growth_order;
  const double elapsed = t - s.halve_anchor_time;
  const double anchor = static_cast<double>(s.halve_anchor_count);
  const double a_prev = s.quad_coeff;
  const bool had_coeff = s.has_coeff;
  s.quad_coeff = (n - anchor) / std::pow(elapsed, alpha);
  s.has_coeff = true;
  if (s.total_assimilated < params.halve_threshold) return std::nullopt;

  const double t_new = t + (codec.symbol_count(codec::Message::Stop) - 1) * codec.symbol_time_s +
                       s.rtt;
  const double projected =
      anchor + params.tolerance * s.quad_coeff * std::pow(t_new - s.halve_anchor_time, alpha);
  if (projected >= static_cast<double>(params.stop_target)) {
    s.stop_estimate = true;
    return codec::Message::Stop;
  }
  if (had_coeff && n < params.tolerance * (anchor + a_prev * std::pow(elapsed, alpha))) {
    s.halve_estimate = true;
    return codec::Message::Halve;
  }
  return std::nullopt;
}

RxStep rx_step(RxState& s, double t, std::int64_t s_arrivals, bool stimulus,
               const RxParams& params, const codec::CodecParams& codec) {
  RxStep out;
  if (s_arrivals > 0) {
    s.total_assimilated += s_arrivals;
    if (!s.first_arrival && s.phase != RxPhase::Idle) s.first_arrival = t;
  }

  switch (s.phase) {
    case RxPhase::Idle:
      if (stimulus) {
        s = RxState{};
        s.phase = RxPhase::ConnectionSetup;
        s.attempt = 1;
        start_attempt(s, out, t, params, codec);
      }
      break;

    case RxPhase::ConnectionSetup:
      if (s.total_assimilated >= params.rtt_threshold) {
        s.phase = RxPhase::ConnectionEstablished;
        s.established_at = t;
        s.rtt = t > s.start_zero_slot ? estimate_rtt(s.start_zero_slot, t) : t - s.attempt_start;
        s.halve_anchor_time = t;
        s.halve_anchor_count = s.total_assimilated;
        s.next_control = t + params.control_period_s;
        out.established = true;
      } else if (t + kTimeSlack >= s.attempt_deadline) {
        out.timed_out = true;
        if (s.attempt >= params.max_attempts) {
          s.phase = RxPhase::Idle;
          s.outcome = RxOutcome::AttemptsExhausted;
          out.gave_up = true;
        } else {
          ++s.attempt;
          start_attempt(s, out, t, params, codec);
        }
      }
      break;

    case RxPhase::ConnectionEstablished:
      if (s.anchor_pending && t + kTimeSlack >= s.halve_anchor_time) {
        s.halve_anchor_count = s.total_assimilated;
        s.anchor_pending = false;
        s.has_coeff = false;
      }
      if (t + kTimeSlack >= s.next_control) {
        s.next_control += params.control_period_s;
        const auto cmd = control_tick(s, t, params, codec);
        if (cmd == codec::Message::Stop) {
          out.send = send(s, codec::Message::Stop, t, codec);
          s.phase = RxPhase::ConnectionRelease;
          s.release_end = s.last_send_end;
        } else if (cmd == codec::Message::Halve) {
          out.send = send(s, codec::Message::Halve, t, codec);
          ++s.halve_count;
          s.halve_anchor_time =
              t + (codec.symbol_count(codec::Message::Halve) - 1) * codec.symbol_time_s + s.rtt;
          s.anchor_pending = true;
        }
      }
      break;

    case RxPhase::ConnectionRelease:
      if (t + kTimeSlack >= s.release_end) {
        s.phase = RxPhase::Idle;
        s.outcome = RxOutcome::Stopped;
        out.released = true;
      }
      break;
  }
  return out;
}

}  // namespace mctcp::rx
