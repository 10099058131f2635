#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/engine.hpp"
#include "mctcp/error.hpp"

using namespace mctcp::channel;

namespace {

// CDF of the inverse-gamma law with shape 3/2 and scale c.
double inv_gamma_cdf(double t, double c) {
  const double x = c / t;
  return std::erfc(std::sqrt(x)) + 2.0 * std::sqrt(x / M_PI) * std::exp(-x);
}

ChannelStats analytic_r(double d) {
  const mctcp::engine::SimConfig cfg;
  const double diff = diffusion_coefficient(cfg.medium, cfg.r_species);
  return analytic_channel_stats(Species::R, d, diff, cfg.tx_geometry, cfg.fit, 10.0);
}

}  // namespace

TEST(ChannelStats, SlidingWindowMassHandTrace) {
  const std::vector<std::uint64_t> counts{0, 5, 5, 0, 10};
  EXPECT_DOUBLE_EQ(sliding_window_mass(counts, 1.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(sliding_window_mass(counts, 1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(sliding_window_mass(counts, 1.0, 3.0), 0.75);
  EXPECT_DOUBLE_EQ(sliding_window_mass(counts, 1.0, 4.0), 1.0);
  EXPECT_DOUBLE_EQ(sliding_window_mass(counts, 1.0, 10.0), 1.0);
}

TEST(ChannelStats, AnalyticHistogramFollowsInverseGamma) {
  const auto s = analytic_r(26.5e-6);
  const mctcp::engine::SimConfig cfg;
  const double diff = diffusion_coefficient(cfg.medium, cfg.r_species);
  const double c = 26.5e-6 * 26.5e-6 / (4.0 * diff);
  EXPECT_EQ(s.pdf_counts.size(), 1000u);
  EXPECT_DOUBLE_EQ(s.horizon_s(), 200.0);
  const double norm = inv_gamma_cdf(200.0, c);
  double cum = 0.0;
  for (std::size_t i = 0; i < s.pdf_counts.size(); ++i) {
    cum += static_cast<double>(s.pdf_counts[i]);
    if (i % 50 == 49) {
      const double t = (i + 1) * s.bin_width_s;
      EXPECT_NEAR(cum / static_cast<double>(s.total_count()), inv_gamma_cdf(t, c) / norm, 1e-6)
          << "t = " << t;
    }
  }
  EXPECT_NEAR(s.p_assim, 0.02642, 1e-4);
  EXPECT_DOUBLE_EQ(s.window_mass, sliding_window_mass(s.pdf_counts, s.bin_width_s, 10.0));
}

TEST(ChannelStats, AnalyticWindowMassDecreasesWithDistance) {
  double prev = 1.0;
  for (double d : {26.5e-6, 35.4e-6, 44.2e-6, 53.0e-6, 61.9e-6}) {
    const double w = analytic_r(d).window_mass;
    EXPECT_LT(w, prev);
    prev = w;
  }
}

TEST(ChannelStats, JsonRoundTrip) {
  auto s = analytic_r(35.4e-6);
  s.source = "particle";
  s.samples = 1234;
  const auto back = channel_stats_from_json(to_json(s));
  EXPECT_EQ(back.species, s.species);
  EXPECT_DOUBLE_EQ(back.distance_m, s.distance_m);
  EXPECT_DOUBLE_EQ(back.p_assim, s.p_assim);
  EXPECT_DOUBLE_EQ(back.window_mass, s.window_mass);
  EXPECT_EQ(back.pdf_counts, s.pdf_counts);
  EXPECT_EQ(back.source, "particle");
  EXPECT_EQ(back.samples, 1234u);
}

TEST(ChannelStats, RejectsMalformedDocuments) {
  EXPECT_THROW(channel_stats_from_json("{}"), mctcp::Error);
  EXPECT_THROW(channel_stats_from_json("not json"), mctcp::Error);
  auto s = analytic_r(26.5e-6);
  s.p_assim = 1.5;
  EXPECT_THROW(s.validate(), mctcp::Error);
}

TEST(ChannelStats, SetLookupByDistance) {
  ChannelStatsSet set({analytic_r(26.5e-6), analytic_r(44.2e-6)});
  EXPECT_TRUE(set.contains(Species::R, 26.505e-6));
  EXPECT_FALSE(set.contains(Species::R, 26.52e-6));
  EXPECT_FALSE(set.contains(Species::S, 26.5e-6));
  EXPECT_DOUBLE_EQ(set.find(Species::R, 44.2e-6).distance_m, 44.2e-6);
  EXPECT_THROW(set.find(Species::R, 30e-6), mctcp::MissingCalibration);
}

TEST(ChannelStats, BundledParticleTablesCoverBothSpecies) {
  const auto set = ChannelStatsSet::load(mctcp::engine::data_dir() / "channel" / "particle.json");
  for (double d : {26.5e-6, 35.4e-6, 44.2e-6, 53.0e-6, 61.9e-6}) {
    for (Species sp : {Species::S, Species::R}) {
      const auto& s = set.find(sp, d);
      EXPECT_EQ(s.source, "particle");
      EXPECT_GE(s.total_count(), 2000u);
      EXPECT_GT(s.window_mass, 0.0);
      EXPECT_LE(s.window_mass, 1.0);
    }
  }
  EXPECT_NEAR(set.find(Species::R, 26.5e-6).p_assim, 0.02642, 0.001);
}
