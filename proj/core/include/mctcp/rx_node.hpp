#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mctcp/codec.hpp"

namespace mctcp::rx {

struct RxParams {
  std::int64_t initial_burst = 1000;  // B_0,RX
  int max_attempts = 20;              // C_a,max
  double attempt_timeout_s = 54.0;    // Timeout_rx
  std::int64_t rtt_threshold = 5;     // zeta_RTT
  std::int64_t halve_threshold = 250; // zeta_halve
  std::int64_t stop_target = 10000;   // zeta_stop
  double control_period_s = 0.2;      // T_w
  double tolerance = 0.95;            // beta
  double growth_order = 2.0;          // alpha

  void validate() const;
};

enum class RxPhase { Idle, ConnectionSetup, ConnectionEstablished, ConnectionRelease };

std::string_view to_string(RxPhase p);

enum class RxOutcome { Pending, Stopped, AttemptsExhausted };

struct RxState {
  RxPhase phase = RxPhase::Idle;
  RxOutcome outcome = RxOutcome::Pending;
  int attempt = 0;                    // C_a
  std::int64_t current_burst = 0;    // b_RX
  std::int64_t total_assimilated = 0; // N(t)
  std::optional<double> first_arrival;  // t_A
  double attempt_start = 0.0;         // first START slot of the current attempt
  double start_zero_slot = 0.0;       // final START slot of the current attempt
  double attempt_deadline = 0.0;
  double established_at = 0.0;        // t_zetaRTT
  double rtt = 0.0;
  double last_send_end = 0.0;         // t_send
  double halve_anchor_time = 0.0;     // t_halve
  std::int64_t halve_anchor_count = 0;  // N_halve
  bool anchor_pending = false;
  double quad_coeff = 0.0;            // a
  bool has_coeff = false;
  int halve_count = 0;                // n_halve
  bool stop_estimate = false;         // E_stop
  bool halve_estimate = false;        // E_halve
  double next_control = 0.0;
  double release_end = 0.0;
  std::int64_t r_emitted = 0;
};

struct Send {
  codec::Message message;
  std::int64_t burst;
  double start;
};

struct RxStep {
  std::optional<Send> send;
  bool established = false;
  bool timed_out = false;
  bool gave_up = false;
  bool released = false;
};

/// RTT from the start of the final START slot to the zeta_RTT-th S
/// assimilation. Throws InvalidParameter unless t_threshold > start_tx_end.
double estimate_rtt(double start_tx_end, double t_threshold);

/// One control decision (HALVE or STOP, or nothing) at time t.
///
/// Estimation is suspended until the last HALVE has had time to act and
/// while a transmission is still on the air. Otherwise:
///   N >= zeta_stop                             -> STOP
///   a = (N - N_halve) / (t - t_halve)^alpha
///   t_new = t + (P_stop - 1) T_S + rtt
///   N >= zeta_halve and
///     N_halve + beta a (t_new - t_halve)^alpha >= zeta_stop -> STOP   (E_stop)
///     N < beta (N_halve + a_prev (t - t_halve)^alpha)       -> HALVE  (E_halve)
std::optional<codec::Message> control_tick(RxState& state, double t, const RxParams& params,
                                           const codec::CodecParams& codec);

/// Advances the RX by one engine tick. `s_arrivals` is the number of S
/// assimilations delivered at this tick; `stimulus` starts a session from Idle.
RxStep rx_step(RxState& state, double t, std::int64_t s_arrivals, bool stimulus,
               const RxParams& params, const codec::CodecParams& codec);

}  // namespace mctcp::rx
