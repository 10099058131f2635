#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mctcp/channel/physics.hpp"

namespace mctcp::channel {

/// Calibrated channel for one species at one distance: how likely a molecule
/// is to be assimilated, and when, given that it is.
///
/// The arrival-time law is stored as a histogram over [0, bins * bin_width).
/// Serialized as a versioned JSON document:
///   {"schema_version": 1, "species": "R", "distance_um": 26.5, "p_assim": ...,
///    "window_mass": ..., "pdf_bin_width_s": 0.2, "pdf_counts": [...],
///    "source": "particle", "samples": 400000}
struct ChannelStats {
  static constexpr int kSchemaVersion = 1;
  static constexpr int kDefaultBins = 1000;

  Species species = Species::R;
  double distance_m = 0.0;
  double p_assim = 0.0;
  /// Largest fraction of the arrival histogram inside one symbol time.
  double window_mass = 0.0;
  double bin_width_s = 0.0;
  std::vector<std::uint64_t> pdf_counts;
  /// "particle" for Monte Carlo calibration, "analytic" for the closed-form profile.
  std::string source;
  /// Molecules released during calibration; 0 for analytic tables.
  std::uint64_t samples = 0;

  std::uint64_t total_count() const;
  double horizon_s() const { return bin_width_s * static_cast<double>(pdf_counts.size()); }
  void validate() const;
};

/// max over window positions of (histogram mass in `window_s`) / total mass.
/// The window slides in whole bins; `window_s` is rounded to a bin count.
double sliding_window_mass(std::span<const std::uint64_t> counts, double bin_width_s,
                           double window_s);

/// Statistics from the closed-form law: p_assim from the gamma-corrected
/// inverse-square rule, arrival profile from the time course of the diffusive
/// flux through a receiver-sized disc at distance d,
///   f(t) ~ t^(-5/2) exp(-d^2 / (4 D t)),
/// i.e. an inverse-gamma law of shape 3/2 and scale d^2/(4D), truncated to the
/// histogram horizon. Counts are the bin masses scaled to 1e9.
ChannelStats analytic_channel_stats(Species species, double distance_m, double diffusivity,
                                    const NodeGeometry& receiver, const GammaFit& fit,
                                    double symbol_time_s,
                                    int bins = ChannelStats::kDefaultBins,
                                    double horizon_s = 0.0 /* 0: 20 symbol times */);

std::string to_json(const ChannelStats& stats);
ChannelStats channel_stats_from_json(const std::string& text);

/// Reads either a single ChannelStats document or a collection
/// {"schema_version": 1, "channel_stats": [...]}.
std::vector<ChannelStats> load_channel_stats(const std::filesystem::path& path);
void save_channel_stats(const std::filesystem::path& path, std::span<const ChannelStats> stats);

/// Lookup of calibrated statistics by (species, distance).
class ChannelStatsSet {
 public:
  ChannelStatsSet() = default;
  explicit ChannelStatsSet(std::vector<ChannelStats> stats);

  static ChannelStatsSet load(const std::filesystem::path& path);

  /// Matches distances within 0.01 um. Throws MissingCalibration with a hint
  /// to run `mctcp calibrate` when nothing matches.
  const ChannelStats& find(Species species, double distance_m) const;
  bool contains(Species species, double distance_m) const;
  std::span<const ChannelStats> all() const { return stats_; }
  bool empty() const { return stats_.empty(); }

 private:
  std::vector<ChannelStats> stats_;
};

}  // namespace mctcp::channel
