// mctcp: run, calibrate and sweep the molecular transport protocol.
//
// Exit codes: 0 success, 1 bad input or configuration, 2 run timeout or
// insufficient calibration samples, 3 sweep with failed runs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/channel/particle_engine.hpp"
#include "mctcp/channel/reliability.hpp"
#include "mctcp/config.hpp"
#include "mctcp/engine.hpp"
#include "mctcp/error.hpp"
#include "mctcp/metrics.hpp"

namespace fs = std::filesystem;
using namespace mctcp;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 1;
constexpr int kIncomplete = 2;
constexpr int kSweepFailures = 3;

const std::vector<double> kDefaultDistancesUm = {26.5, 35.4, 44.2, 53.0, 61.9};

engine::SimConfig load(const std::string& path) {
  return path.empty() ? engine::SimConfig{} : config::load_config(path);
}

std::vector<double> distances_m(const std::string& list) {
  std::vector<double> um = list.empty() ? kDefaultDistancesUm : config::parse_number_list(list);
  if (um.empty()) throw InvalidParameter("no distances given");
  std::vector<double> out;
  for (double d : um) {
    if (!(d > 0.0)) throw InvalidParameter("distances must be > 0");
    out.push_back(d * 1e-6);
  }
  return out;
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_run(const std::string& cfg_path, std::optional<std::uint64_t> seed,
            const std::string& channel, const std::string& out_dir) {
  auto cfg = load(cfg_path);
  if (seed) cfg.seed = *seed;
  if (!channel.empty()) cfg.channel_mode = engine::channel_mode_from_string(channel);
  const auto result = engine::run(cfg);
  warn_all(result.summary.warnings);

  fs::create_directories(out_dir);
  result.log.write_ndjson(fs::path(out_dir) / "eventlog.ndjson");
  metrics::write_text(fs::path(out_dir) / "summary.json", engine::to_json(result.summary) + "\n");
  const auto m = metrics::compute_metrics(result.summary, cfg.rx_geometry, cfg.fit);
  metrics::write_text(fs::path(out_dir) / "metrics.csv", metrics::metrics_csv({&m, 1}));

  const auto& s = result.summary;
  std::printf("status %s  attempts %d  halves %d  c_TX %lld  delivered %lld\n",
              std::string(engine::to_string(s.status)).c_str(), s.attempts, s.halve_count,
              static_cast<long long>(s.s_emitted), static_cast<long long>(s.s_delivered));
  if (m.complete) {
    std::printf("thr %.4g  rho %.4g  rho_n %.4g  oh %.4g  T_D %.4g s\n", m.throughput,
                m.efficiency, m.normalized_efficiency, m.overhead, m.delivery_time);
  }
  return s.completed() ? kOk : kIncomplete;
}

struct CalibrateOptions {
  std::string config;
  std::string distances;
  std::uint64_t samples = 400000;
  std::string out = "channel_stats.json";
  std::string species = "both";
  std::uint64_t min_absorptions = 1000;
  double horizon_s = 0.0;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  bool analytic = false;
};

channel::BurstSetup burst_setup(const engine::SimConfig& cfg, channel::Species species) {
  channel::BurstSetup b;
  b.medium = cfg.medium;
  b.species = species == channel::Species::S ? cfg.s_species : cfg.r_species;
  b.receiver = species == channel::Species::S ? cfg.rx_geometry : cfg.tx_geometry;
  b.p_capture = species == channel::Species::S ? cfg.p_capture_rx : cfg.p_capture_tx;
  b.cull_factor = cfg.cull_factor;
  return b;
}

std::vector<channel::Species> species_list(const std::string& s) {
  if (s == "both") return {channel::Species::S, channel::Species::R};
  return {channel::species_from_string(s)};
}

int cmd_calibrate(const CalibrateOptions& o) {
  if (o.samples == 0) throw InvalidParameter("--samples must be > 0");
  const auto cfg = load(o.config);
  std::vector<channel::ChannelStats> all;
  for (auto sp : species_list(o.species)) {
    if (o.analytic) {
      const auto& spec = sp == channel::Species::S ? cfg.s_species : cfg.r_species;
      const auto& receiver = sp == channel::Species::S ? cfg.rx_geometry : cfg.tx_geometry;
      const double diff = channel::diffusion_coefficient(cfg.medium, spec);
      for (double d : distances_m(o.distances)) {
        all.push_back(channel::analytic_channel_stats(sp, d, diff, receiver, cfg.fit,
                                                      cfg.codec.symbol_time_s,
                                                      channel::ChannelStats::kDefaultBins,
                                                      o.horizon_s));
      }
      continue;
    }
    channel::CalibrationRequest req;
    req.setup = burst_setup(cfg, sp);
    req.distances_m = distances_m(o.distances);
    req.samples = o.samples;
    req.symbol_time_s = cfg.codec.symbol_time_s;
    req.horizon_s = o.horizon_s;
    req.min_absorptions = o.min_absorptions;
    req.seed = derive_seed(o.seed.value_or(cfg.seed), static_cast<std::uint64_t>(sp));
    req.threads = o.threads;
    auto stats = channel::calibrate(req);
    all.insert(all.end(), stats.begin(), stats.end());
  }
  channel::save_channel_stats(o.out, all);
  std::printf("%-7s %8s %12s %12s %10s\n", "species", "d_um", "p_assim", "window_mass", "hits");
  for (const auto& s : all) {
    std::printf("%-7s %8.1f %12.6g %12.4f %10llu\n",
                std::string(channel::to_string(s.species)).c_str(), s.distance_m * 1e6,
                s.p_assim, s.window_mass, static_cast<unsigned long long>(s.total_count()));
  }
  std::printf("wrote %s\n", o.out.c_str());
  return kOk;
}

int cmd_fit_capture(const std::string& cfg_path, const std::string& species, double d_um,
                    std::uint64_t samples, double horizon_s, int threads) {
  const auto cfg = load(cfg_path);
  for (auto sp : species_list(species)) {
    auto setup = burst_setup(cfg, sp);
    setup.distance_m = d_um * 1e-6;
    const double target =
        channel::p_assim(setup.receiver.receptor_count, setup.distance_m, setup.receiver, cfg.fit);
    const auto fit = channel::calibrate_capture_probability(
        setup, target, samples, horizon_s, derive_seed(cfg.seed, 7), 24, threads);
    std::printf("%s p_capture %.6g  p_assim %.6g (target %.6g)\n",
                std::string(channel::to_string(sp)).c_str(), fit.p_capture, fit.achieved_p_assim,
                target);
  }
  return kOk;
}

int cmd_sweep(const std::string& cfg_path, const std::string& distances, int replicates,
              int parallel, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  auto cfg = load(cfg_path);
  if (seed) cfg.seed = *seed;
  auto ds = distances_m(distances);
  std::sort(ds.begin(), ds.end());
  const auto configs = engine::sweep_grid(cfg, ds, replicates);
  for (const auto& c : configs) c.validate();
  const auto entries = engine::sweep(configs, parallel);

  std::vector<metrics::RunMetrics> rows;
  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.error) {
      ++failures;
      std::cerr << "run " << i << " (d=" << configs[i].distance_m * 1e6 << " um, seed "
                << configs[i].seed << ") failed: " << *e.error << '\n';
      rows.push_back(metrics::compute_metrics(e.summary, cfg.rx_geometry, cfg.fit));
      continue;
    }
    if (!e.summary.completed()) {
      ++failures;
      std::cerr << "run " << i << " (d=" << configs[i].distance_m * 1e6 << " um, seed "
                << configs[i].seed << ") ended with status "
                << engine::to_string(e.summary.status) << '\n';
    }
    rows.push_back(metrics::compute_metrics(e.summary, cfg.rx_geometry, cfg.fit));
  }
  fs::create_directories(out_dir);
  metrics::write_text(fs::path(out_dir) / "metrics.csv", metrics::metrics_csv(rows));
  metrics::write_text(fs::path(out_dir) / "aggregate.json", metrics::aggregate_json(rows) + "\n");
  std::printf("%zu runs, %d failed; wrote %s\n", rows.size(), failures, out_dir.c_str());
  return failures > 0 ? kSweepFailures : kOk;
}

channel::WindowMassTable window_table(const std::string& source, const engine::SimConfig& cfg,
                                      const std::vector<double>& ds) {
  if (source == "reference") return channel::WindowMassTable::reference();
  std::vector<channel::ChannelStats> stats;
  if (source == "analytic") {
    const double dr = channel::diffusion_coefficient(cfg.medium, cfg.r_species);
    for (double d : ds) {
      stats.push_back(channel::analytic_channel_stats(channel::Species::R, d, dr, cfg.tx_geometry,
                                                      cfg.fit, cfg.codec.symbol_time_s));
    }
  } else {
    const fs::path path =
        source == "particle" ? engine::data_dir() / "channel" / "particle.json" : fs::path(source);
    stats = channel::load_channel_stats(path);
  }
  return channel::WindowMassTable::from_stats(stats, channel::Species::R);
}

int cmd_ranging_table(const std::string& cfg_path, double target_pc, const std::string& distances,
                      const std::string& window_source) {
  const auto cfg = load(cfg_path);
  const auto ds = distances_m(distances);
  channel::ReliabilityModel model;
  model.receiver = cfg.tx_geometry;
  model.fit = cfg.fit;
  model.threshold = cfg.codec.detection_threshold;
  model.window_mass = window_table(window_source, cfg, ds);
  std::printf("%8s %10s %12s %10s\n", "d_um", "burst", "p_hit", "P_C");
  for (double d : ds) {
    const double p = model.p_hit(d);
    try {
      const auto b = channel::min_burst_for_reliability(model, d, target_pc, cfg.rx.initial_burst,
                                                        cfg.rx.max_attempts);
      std::printf("%8.1f %10lld %12.6g %10.4f\n", d * 1e6, static_cast<long long>(b), p,
                  channel::p_correct_symbol(b, p, model.threshold));
    } catch (const OutOfRange&) {
      std::printf("%8.1f %10s %12.6g %10s\n", d * 1e6, "none", p, "-");
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular transport protocol simulator"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Simulate one session");
  std::string channel;
  std::string run_out = "out";
  run->add_option("--config", cfg_path, "Configuration file");
  run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--channel", channel, "Channel model")
      ->check(CLI::IsMember({"particle", "statistical"}));
  run->add_option("--out", run_out, "Output directory");

  auto* cal = app.add_subcommand("calibrate", "Monte Carlo channel statistics");
  CalibrateOptions co;
  cal->add_option("--config", co.config, "Configuration file");
  cal->add_option("--distances", co.distances, "Comma-separated distances in um");
  cal->add_option("--samples", co.samples, "Molecules released per distance");
  cal->add_option("--out", co.out, "Output ChannelStats file");
  cal->add_option("--species", co.species, "S, R or both")
      ->check(CLI::IsMember({"S", "R", "both"}));
  cal->add_option("--min-absorptions", co.min_absorptions, "Required absorptions per distance");
  cal->add_option("--horizon", co.horizon_s, "Histogram horizon in s (default 20 T_S)");
  cal->add_option("--threads", co.threads, "Worker threads");
  cal->add_option("--seed", co.seed, "Override the configured seed");
  cal->add_flag("--analytic", co.analytic, "Closed-form statistics instead of Monte Carlo");

  auto* show = app.add_subcommand("print-config", "Print every configuration key");
  show->add_option("--config", cfg_path, "Configuration file");

  auto* fit = app.add_subcommand("fit-capture", "Fit p_capture to the analytic assimilation law");
  std::string fit_species = "both";
  double fit_d = 26.5;
  std::uint64_t fit_samples = 60000;
  double fit_horizon = 200.0;
  int fit_threads = 1;
  fit->add_option("--config", cfg_path, "Configuration file");
  fit->add_option("--species", fit_species, "S, R or both")
      ->check(CLI::IsMember({"S", "R", "both"}));
  fit->add_option("--distance", fit_d, "Distance in um");
  fit->add_option("--samples", fit_samples, "Molecules per evaluation");
  fit->add_option("--horizon", fit_horizon, "Horizon in s");
  fit->add_option("--threads", fit_threads, "Worker threads");

  auto* sw = app.add_subcommand("sweep", "Runs over distances and seeds");
  std::string sw_distances;
  int replicates = 3;
  int parallel = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string sw_out = "sweep";
  sw->add_option("--config", cfg_path, "Configuration file");
  sw->add_option("--distances", sw_distances, "Comma-separated distances in um");
  sw->add_option("--seeds", replicates, "Seeds per distance");
  sw->add_option("--seed", seed, "Master seed");
  sw->add_option("--parallel", parallel, "Worker threads");
  sw->add_option("--out", sw_out, "Output directory");

  auto* rt = app.add_subcommand("ranging-table", "Smallest reliable control burst per distance");
  double target_pc = 0.9;
  std::string rt_distances;
  std::string window_source = "reference";
  rt->add_option("--config", cfg_path, "Configuration file");
  rt->add_option("--target-pc", target_pc, "Required symbol success probability");
  rt->add_option("--distances", rt_distances, "Comma-separated distances in um");
  rt->add_option("--window-mass", window_source,
                 "reference, analytic, particle or a ChannelStats file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*show) {
      std::fputs(config::render_config(load(cfg_path)).c_str(), stdout);
      return kOk;
    }
    if (*run) return cmd_run(cfg_path, seed, channel, run_out);
    if (*cal) return cmd_calibrate(co);
    if (*fit) return cmd_fit_capture(cfg_path, fit_species, fit_d, fit_samples, fit_horizon, fit_threads);
    if (*sw) return cmd_sweep(cfg_path, sw_distances, replicates, parallel, sw_out, seed);
    if (*rt) return cmd_ranging_table(cfg_path, target_pc, rt_distances, window_source);
  } catch (const CalibrationFailed& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIncomplete;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}
