#include "mctcp/codec.hpp"

#include <algorithm>

#include "mctcp/error.hpp"

namespace mctcp::codec {

std::string_view to_string(Message m) {
  switch (m) {
    case Message::Start: return "START";
    case Message::Halve: return "HALVE";
    case Message::Stop: return "STOP";
  }
  return "?";
}

const std::string& CodecParams::codeword(Message m) const {
  switch (m) {
    case Message::Start: return start;
    case Message::Halve: return halve;
    case Message::Stop: return stop;
  }
  throw InvalidParameter("unknown message");
}

namespace {

bool is_prefix(std::string_view a, std::string_view b) {
  return a.size() <= b.size() && b.substr(0, a.size()) == a;
}

}  // namespace

void CodecParams::validate() const {
  if (!(symbol_time_s > 0.0)) throw InvalidParameter("symbol time must be > 0");
  if (detection_threshold < 1) throw InvalidParameter("detection threshold must be >= 1");
  if (sync_sample_divisor < 1) throw InvalidParameter("sync sample divisor must be >= 1");
  for (Message m : kAllMessages) {
    const std::string& w = codeword(m);
    if (w.empty() || w.front() != '1') {
      throw InvalidParameter(std::string("codeword for ") + std::string(to_string(m)) +
                             " must start with 1");
    }
    if (w.find_first_not_of("01") != std::string::npos) {
      throw InvalidParameter("codewords are strings of 0 and 1");
    }
  }
  // START is alone in its accepting state; HALVE and STOP share one.
  if (is_prefix(halve, stop) || is_prefix(stop, halve)) {
    throw InvalidParameter("HALVE and STOP codewords must not prefix each other");
  }
}

std::int64_t window_count(std::span<const double> log, double t, double symbol_time_s) {
  const auto lo = std::upper_bound(log.begin(), log.end(), t - symbol_time_s);
  const auto hi = std::upper_bound(log.begin(), log.end(), t);
  return hi > lo ? hi - lo : 0;
}

std::int64_t AbsorptionWindow::count(double t) {
  while (!times_.empty() && times_.front() <= t - width_) times_.pop_front();
  return std::count_if(times_.begin(), times_.end(), [t](double x) { return x <= t; });
}

SyncStep sync_step(SyncState s, double t, std::int64_t k, const CodecParams& params) {
  s.window_count = k;
  switch (s.phase) {
    case SyncPhase::WaitForSync:
      if (k >= params.detection_threshold) {
        s.phase = SyncPhase::SignalDetected;
        s.t_star = t;
        s.t_sync = t;
        s.n_prev = k;
      }
      return {s, false};
    case SyncPhase::SignalDetected:
      if (t - s.t_star < params.symbol_time_s && k > s.n_prev) {
        s.t_sync = t;
        s.n_prev = k;
        return {s, false};
      }
      s.phase = SyncPhase::Synchronized;
      return {s, true};
    case SyncPhase::Synchronized:
      return {s, false};
  }
  return {s, false};
}

DecodeStep decode_step(DecoderState s, int symbol, MessageSet expected,
                       const CodecParams& params) {
  s.pattern.push_back(symbol ? '1' : '0');
  ++s.symbols_read;
  bool viable = false;
  for (Message m : kAllMessages) {
    if (!expected.contains(m)) continue;
    const std::string& w = params.codeword(m);
    if (s.pattern == w) {
      s.pattern.clear();
      s.decoded = m;
      return {s, m, false};
    }
    viable = viable || is_prefix(s.pattern, w);
  }
  if (viable) return {s, std::nullopt, false};
  s.pattern.clear();
  return {s, std::nullopt, true};
}

std::vector<Emission> encode_message(Message m, std::int64_t burst, const CodecParams& params) {
  if (burst <= 0) throw InvalidParameter("burst size must be > 0");
  const std::string& w = params.codeword(m);
  std::vector<Emission> out;
  out.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out.push_back({static_cast<double>(k) * params.symbol_time_s, w[k] == '1' ? burst : 0});
  }
  return out;
}

}  // namespace mctcp::codec
