#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "mctcp/channel/physics.hpp"
#include "mctcp/codec.hpp"
#include "mctcp/engine.hpp"

namespace mctcp::metrics {

struct RunMetrics {
  double distance_um = 0.0;
  std::uint64_t seed = 0;
  /// False when the session did not end with a STOP decoded at the TX; the
  /// performance figures are then NaN.
  bool complete = false;
  double throughput = 0.0;             // thr = zeta_stop / T_D, molecules/s
  double efficiency = 0.0;             // rho = zeta_stop / c_TX
  double normalized_efficiency = 0.0;  // rho_n = zeta_stop / A(R, d, c_TX)
  double overhead = 0.0;               // oh
  double delivery_time = 0.0;          // T_D, s
  int halve_count = 0;
  int attempts = 0;
  std::int64_t total_emitted_s = 0;    // c_TX
  std::int64_t total_emitted_r = 0;
};

/// R molecules spent on control per S molecule emitted:
///   B_0,RX (sum_{i=1..C_a} i (P_start - 1) + P_stop C_a + n_halve C_a (P_halve - 1)) / c_TX
double overhead(std::int64_t b0_rx, int attempts, int halve_count, std::int64_t c_tx,
                const codec::CodecParams& codec);

/// T_D runs from the start of the successful ranging attempt to the STOP
/// decode at the TX; failed attempts count toward oh but not T_D.
RunMetrics compute_metrics(const engine::SessionSummary& summary,
                           const channel::NodeGeometry& receiver, const channel::GammaFit& fit);

/// Header plus one row per run:
///   d_um,seed,thr,rho,rho_n,oh,T_D,c_TX,C_a,n_halve
/// Incomplete runs leave the performance fields empty.
std::string metrics_csv(std::span<const RunMetrics> rows);

/// {"schema_version": 1, "distances": [{"d_um", "runs", "complete", "mean": {...},
/// "std": {...}}, ...]} over complete runs; std is the sample deviation.
std::string aggregate_json(std::span<const RunMetrics> rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mctcp::metrics
