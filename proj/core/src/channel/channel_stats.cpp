#include "mctcp/channel/channel_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mctcp/error.hpp"

namespace mctcp::channel {

using nlohmann::json;

namespace {

constexpr double kDistanceMatchUm = 0.01;
constexpr double kAnalyticScale = 1e9;

double round_um(double metres) { return std::round(metres * 1e12) / 1e6; }

// Upper regularised incomplete gamma Q(3/2, x).
double upper_gamma_three_halves(double x) {
  if (x <= 0.0) return 1.0;
  const double s = std::sqrt(x);
  return std::erfc(s) + 2.0 * s / std::sqrt(std::numbers::pi) * std::exp(-x);
}

json stats_to_json(const ChannelStats& s) {
  return json{{"schema_version", ChannelStats::kSchemaVersion},
              {"species", std::string(to_string(s.species))},
              {"distance_um", round_um(s.distance_m)},
              {"p_assim", s.p_assim},
              {"window_mass", s.window_mass},
              {"pdf_bin_width_s", s.bin_width_s},
              {"pdf_counts", s.pdf_counts},
              {"source", s.source},
              {"samples", s.samples}};
}

ChannelStats stats_from_json_unchecked(const json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != ChannelStats::kSchemaVersion) {
    throw InvalidParameter("unsupported ChannelStats schema_version " + std::to_string(version));
  }
  ChannelStats s;
  s.species = species_from_string(j.value("species", std::string("R")));
  s.distance_m = j.at("distance_um").get<double>() * 1e-6;
  s.p_assim = j.at("p_assim").get<double>();
  s.window_mass = j.at("window_mass").get<double>();
  s.bin_width_s = j.at("pdf_bin_width_s").get<double>();
  s.pdf_counts = j.at("pdf_counts").get<std::vector<std::uint64_t>>();
  s.source = j.value("source", std::string("unknown"));
  s.samples = j.value("samples", std::uint64_t{0});
  s.validate();
  return s;
}

ChannelStats stats_from_json(const json& j) {
  try {
    return stats_from_json_unchecked(j);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("malformed ChannelStats document: ") + e.what());
  }
}

}  // namespace

std::uint64_t ChannelStats::total_count() const {
  return std::accumulate(pdf_counts.begin(), pdf_counts.end(), std::uint64_t{0});
}

void ChannelStats::validate() const {
  if (!(distance_m > 0.0)) throw InvalidParameter("ChannelStats: distance must be > 0");
  if (!(p_assim >= 0.0 && p_assim <= 1.0)) {
    throw InvalidParameter("ChannelStats: p_assim must lie in [0, 1]");
  }
  if (!(window_mass >= 0.0 && window_mass <= 1.0)) {
    throw InvalidParameter("ChannelStats: window_mass must lie in [0, 1]");
  }
  if (!(bin_width_s > 0.0)) throw InvalidParameter("ChannelStats: bin width must be > 0");
  if (pdf_counts.empty()) throw InvalidParameter("ChannelStats: empty arrival histogram");
  if (total_count() == 0) throw InvalidParameter("ChannelStats: arrival histogram has no mass");
}

double sliding_window_mass(std::span<const std::uint64_t> counts, double bin_width_s,
                           double window_s) {
  if (!(bin_width_s > 0.0) || !(window_s > 0.0)) {
    throw InvalidParameter("sliding_window_mass: widths must be > 0");
  }
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) return 0.0;
  const std::size_t w =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(window_s / bin_width_s)), 1,
                              counts.size());
  std::uint64_t run = std::accumulate(counts.begin(), counts.begin() + w, std::uint64_t{0});
  std::uint64_t best = run;
  for (std::size_t i = w; i < counts.size(); ++i) {
    run += counts[i];
    run -= counts[i - w];
    best = std::max(best, run);
  }
  return static_cast<double>(best) / static_cast<double>(total);
}

ChannelStats analytic_channel_stats(Species species, double distance_m, double diffusivity,
                                    const NodeGeometry& receiver, const GammaFit& fit,
                                    double symbol_time_s, int bins, double horizon_s) {
  if (bins < 1) throw InvalidParameter("analytic_channel_stats: bins must be >= 1");
  if (!(diffusivity > 0.0)) throw InvalidParameter("diffusion coefficient must be > 0");
  if (!(symbol_time_s > 0.0)) throw InvalidParameter("symbol time must be > 0");
  if (horizon_s <= 0.0) horizon_s = 20.0 * symbol_time_s;

  ChannelStats s;
  s.species = species;
  s.distance_m = distance_m;
  s.p_assim = p_assim(receiver.receptor_count, distance_m, receiver, fit);
  s.bin_width_s = horizon_s / bins;
  s.source = "analytic";
  s.pdf_counts.resize(static_cast<std::size_t>(bins));

  const double scale = distance_m * distance_m / (4.0 * diffusivity);
  auto cdf = [scale](double t) { return t <= 0.0 ? 0.0 : upper_gamma_three_halves(scale / t); };
  double prev = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double next = cdf((i + 1) * s.bin_width_s);
    s.pdf_counts[static_cast<std::size_t>(i)] =
        static_cast<std::uint64_t>(std::llround((next - prev) * kAnalyticScale));
    prev = next;
  }
  s.window_mass = sliding_window_mass(s.pdf_counts, s.bin_width_s, symbol_time_s);
  s.validate();
  return s;
}

std::string to_json(const ChannelStats& stats) { return stats_to_json(stats).dump(); }

ChannelStats channel_stats_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("malformed ChannelStats document: ") + e.what());
  }
  return stats_from_json(doc);
}

std::vector<ChannelStats> load_channel_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingCalibration("cannot open channel statistics file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidParameter("malformed channel statistics file " + path.string() + ": " + e.what());
  }
  std::vector<ChannelStats> out;
  if (doc.contains("channel_stats")) {
    for (const auto& entry : doc.at("channel_stats")) out.push_back(stats_from_json(entry));
  } else {
    out.push_back(stats_from_json(doc));
  }
  return out;
}

void save_channel_stats(const std::filesystem::path& path, std::span<const ChannelStats> stats) {
  json doc{{"schema_version", ChannelStats::kSchemaVersion}, {"channel_stats", json::array()}};
  for (const auto& s : stats) doc["channel_stats"].push_back(stats_to_json(s));
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

ChannelStatsSet::ChannelStatsSet(std::vector<ChannelStats> stats) : stats_(std::move(stats)) {
  for (const auto& s : stats_) s.validate();
}

ChannelStatsSet ChannelStatsSet::load(const std::filesystem::path& path) {
  return ChannelStatsSet(load_channel_stats(path));
}

bool ChannelStatsSet::contains(Species species, double distance_m) const {
  return std::any_of(stats_.begin(), stats_.end(), [&](const ChannelStats& s) {
    return s.species == species && std::abs(s.distance_m - distance_m) * 1e6 < kDistanceMatchUm;
  });
}

const ChannelStats& ChannelStatsSet::find(Species species, double distance_m) const {
  for (const auto& s : stats_) {
    if (s.species == species && std::abs(s.distance_m - distance_m) * 1e6 < kDistanceMatchUm) {
      return s;
    }
  }
  std::ostringstream msg;
  msg << "no channel statistics for species " << to_string(species) << " at d = "
      << distance_m * 1e6 << " um; run `mctcp calibrate --distances " << distance_m * 1e6
      << "` and point channel_stats at the output";
  throw MissingCalibration(msg.str());
}

}  // namespace mctcp::channel
