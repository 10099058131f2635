#include "mctcp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <vector>

#include "json.hpp"
#include "mctcp/error.hpp"

namespace mctcp::metrics {

using nlohmann::json;

double overhead(std::int64_t b0_rx, int attempts, int halve_count, std::int64_t c_tx,
                const codec::CodecParams& codec) {
  if (c_tx <= 0) throw InvalidParameter("overhead needs c_TX > 0");
  const double p_start = codec.symbol_count(codec::Message::Start);
  const double p_halve = codec.symbol_count(codec::Message::Halve);
  const double p_stop = codec.symbol_count(codec::Message::Stop);
  const double ca = attempts;
  const double ranging = (p_start - 1.0) * ca * (ca + 1.0) / 2.0;
  return static_cast<double>(b0_rx) *
         (ranging + p_stop * ca + static_cast<double>(halve_count) * ca * (p_halve - 1.0)) /
         static_cast<double>(c_tx);
}

RunMetrics compute_metrics(const engine::SessionSummary& s, const channel::NodeGeometry& receiver,
                           const channel::GammaFit& fit) {
  RunMetrics m;
  m.distance_um = s.distance_m * 1e6;
  m.seed = s.seed;
  m.halve_count = s.halve_count;
  m.attempts = s.attempts;
  m.total_emitted_s = s.s_emitted;
  m.total_emitted_r = s.r_emitted;
  m.complete = s.completed() && s.attempt_start && s.stop_decoded_at && s.s_emitted > 0;
  if (!m.complete) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.throughput = m.efficiency = m.normalized_efficiency = m.overhead = m.delivery_time = nan;
    return m;
  }
  const auto target = static_cast<double>(s.stop_target);
  const auto c_tx = static_cast<double>(s.s_emitted);
  m.delivery_time = *s.stop_decoded_at - *s.attempt_start;
  m.throughput = target / m.delivery_time;
  m.efficiency = target / c_tx;
  m.normalized_efficiency =
      target / channel::assimilation_count(receiver.receptor_count, s.distance_m, c_tx, receiver,
                                           fit);
  m.overhead = overhead(s.b0_rx, s.attempts, s.halve_count, s.s_emitted, s.codec);
  return m;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// RFC 4180: quote fields holding separators, quotes or line breaks.
std::string field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

constexpr const char* kColumns[] = {"d_um", "thr", "rho", "rho_n", "oh",
                                    "T_D", "c_TX", "C_a", "n_halve"};

std::vector<double> values(const RunMetrics& m) {
  return {m.distance_um,
          m.throughput,
          m.efficiency,
          m.normalized_efficiency,
          m.overhead,
          m.delivery_time,
          static_cast<double>(m.total_emitted_s),
          static_cast<double>(m.attempts),
          static_cast<double>(m.halve_count)};
}

}  // namespace

std::string metrics_csv(std::span<const RunMetrics> rows) {
  std::string out = "d_um,seed,thr,rho,rho_n,oh,T_D,c_TX,C_a,n_halve\r\n";
  for (const auto& m : rows) {
    const bool ok = m.complete;
    const std::string cells[] = {
        num(m.distance_um),
        std::to_string(m.seed),
        ok ? num(m.throughput) : "",
        ok ? num(m.efficiency) : "",
        ok ? num(m.normalized_efficiency) : "",
        ok ? num(m.overhead) : "",
        ok ? num(m.delivery_time) : "",
        std::to_string(m.total_emitted_s),
        std::to_string(m.attempts),
        std::to_string(m.halve_count),
    };
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    out += "\r\n";
  }
  return out;
}

std::string aggregate_json(std::span<const RunMetrics> rows) {
  std::map<double, std::vector<const RunMetrics*>> by_distance;
  for (const auto& m : rows) by_distance[m.distance_um].push_back(&m);

  json doc{{"schema_version", 1}, {"distances", json::array()}};
  for (const auto& [d, runs] : by_distance) {
    std::vector<std::vector<double>> cols(std::size(kColumns));
    std::size_t complete = 0;
    for (const RunMetrics* m : runs) {
      if (!m->complete) continue;
      ++complete;
      const auto v = values(*m);
      for (std::size_t c = 0; c < v.size(); ++c) cols[c].push_back(v[c]);
    }
    json mean = json::object();
    json sd = json::object();
    for (std::size_t c = 1; c < std::size(kColumns); ++c) {
      const auto& xs = cols[c];
      if (xs.empty()) {
        mean[kColumns[c]] = nullptr;
        sd[kColumns[c]] = nullptr;
        continue;
      }
      double sum = 0.0;
      for (double x : xs) sum += x;
      const double mu = sum / static_cast<double>(xs.size());
      double ss = 0.0;
      for (double x : xs) ss += (x - mu) * (x - mu);
      mean[kColumns[c]] = mu;
      sd[kColumns[c]] = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    }
    doc["distances"].push_back({{"d_um", d},
                                {"runs", runs.size()},
                                {"complete", complete},
                                {"mean", mean},
                                {"std", sd}});
  }
  return doc.dump(1);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidParameter("failed writing " + path.string());
}

}  // namespace mctcp::metrics
