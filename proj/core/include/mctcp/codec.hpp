#pragma once

#include <cstdint>
#include <deque>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mctcp::codec {

enum class Message { Start, Halve, Stop };

std::string_view to_string(Message m);

/// Small set of messages, used for the codewords a node currently accepts.
class MessageSet {
 public:
  constexpr MessageSet() = default;
  constexpr MessageSet(std::initializer_list<Message> ms) {
    for (Message m : ms) insert(m);
  }
  constexpr void insert(Message m) { bits_ |= bit(m); }
  constexpr bool contains(Message m) const { return (bits_ & bit(m)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1));
  }
  friend constexpr bool operator==(MessageSet, MessageSet) = default;

 private:
  static constexpr unsigned bit(Message m) { return 1u << static_cast<unsigned>(m); }
  unsigned bits_ = 0;
};

inline constexpr Message kAllMessages[] = {Message::Start, Message::Halve, Message::Stop};

struct CodecParams {
  double symbol_time_s = 10.0;            // T_S
  std::int64_t detection_threshold = 34;  // zeta_S
  int sync_sample_divisor = 20;           // sampling period T_S / divisor
  std::string start = "110";
  std::string halve = "10";
  std::string stop = "111";

  const std::string& codeword(Message m) const;
  /// P_start, P_halve, P_stop.
  int symbol_count(Message m) const { return static_cast<int>(codeword(m).size()); }
  double sample_period_s() const { return symbol_time_s / sync_sample_divisor; }

  /// Codewords must be non-empty binary strings starting with '1', and no
  /// codeword may prefix another one that the same TX state accepts.
  void validate() const;
};

/// Count of events in the half-open window (t - T_S, t]; `log` sorted.
std::int64_t window_count(std::span<const double> log, double t, double symbol_time_s);

/// Running window count for monotone query times.
class AbsorptionWindow {
 public:
  explicit AbsorptionWindow(double symbol_time_s) : width_(symbol_time_s) {}

  void push(double t) { times_.push_back(t); }
  /// Same result as window_count over every pushed time; `t` must not decrease.
  std::int64_t count(double t);

 private:
  double width_;
  std::deque<double> times_;
};

enum class SyncPhase { WaitForSync, SignalDetected, Synchronized };

struct SyncState {
  SyncPhase phase = SyncPhase::WaitForSync;
  double t_star = 0.0;
  double t_sync = 0.0;
  std::int64_t n_prev = 0;
  std::int64_t window_count = 0;
};

struct SyncStep {
  SyncState state;
  bool synchronized = false;
};

/// One sample of the synchronization search.
///
/// WaitForSync moves to SignalDetected (t* = t_sync = t) once K reaches
/// zeta_S. In SignalDetected a strictly larger K moves t_sync to t; the search
/// ends when K fails to increase or T_S has elapsed since t*.
SyncStep sync_step(SyncState state, double t, std::int64_t k, const CodecParams& params);

struct DecoderState {
  std::string pattern;
  double next_read = 0.0;  // t_w
  int symbols_read = 0;    // w
  std::optional<Message> decoded;
};

struct DecodeStep {
  DecoderState state;
  std::optional<Message> message;
  /// The pattern stopped matching every expected codeword; resynchronize.
  bool sync_lost = false;
};

/// Appends one symbol. A complete codeword from `expected` yields the message
/// and clears the pattern; a pattern that no expected codeword starts with
/// clears it and reports sync_lost.
DecodeStep decode_step(DecoderState state, int symbol, MessageSet expected,
                       const CodecParams& params);

struct Emission {
  double offset_s;
  std::int64_t molecules;
};

/// One entry per codeword symbol: b molecules for '1', none for '0'.
std::vector<Emission> encode_message(Message m, std::int64_t burst, const CodecParams& params);

}  // namespace mctcp::codec
