#include <gtest/gtest.h>
#include <gmock/gmock.h>

#include <fstream>
#include <set>
#include <sstream>

#include "mctcp/config.hpp"
#include "mctcp/error.hpp"

using namespace mctcp;
using ::testing::HasSubstr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    config::parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsRenderToGolden) {
  EXPECT_EQ(config::render_config(engine::SimConfig{}), slurp(MCTCP_GOLDEN_DIR "/default.cfg"));
  EXPECT_EQ(slurp(MCTCP_CONFIG_DIR "/default.cfg"), slurp(MCTCP_GOLDEN_DIR "/default.cfg"));
}

TEST(Config, ParsesUnitsFromKeySuffix) {
  const auto c = config::parse_config(
      "# comment\n"
      "d_um = 44.2\n"
      "\n"
      "dt_us = 10\n"
      "delta_t_ms = 40\n"
      "r_r_tx_nm = 5\n"
      "zeta_stop = 20000\n"
      "channel = particle\n"
      "codeword_halve = 100\n");
  EXPECT_DOUBLE_EQ(c.distance_m, 44.2e-6);
  EXPECT_DOUBLE_EQ(c.medium.timestep_s, 10e-6);
  EXPECT_DOUBLE_EQ(c.tx.emission_interval_s, 0.04);
  EXPECT_DOUBLE_EQ(c.tx_geometry.receptor_radius_m, 5e-9);
  EXPECT_EQ(c.rx.stop_target, 20000);
  EXPECT_EQ(c.channel_mode, engine::ChannelMode::Particle);
  EXPECT_EQ(c.codec.halve, "100");
}

TEST(Config, RenderParseRoundTrip) {
  engine::SimConfig c;
  c.distance_m = 61.9e-6;
  c.seed = 123456789012345ull;
  c.rx.halve_threshold = 300;
  c.channel_stats = "particle";
  const auto text = config::render_config(c);
  EXPECT_EQ(config::render_config(config::parse_config(text)), text);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_THAT(error_of("d_um = 30\nbogus = 1\n"), HasSubstr("line 2"));
  EXPECT_THAT(error_of("d_um = 30\nbogus = 1\n"), HasSubstr("bogus"));
  EXPECT_THAT(error_of("d_um = 30\n\nd_um = 31\n"), HasSubstr("line 3"));
  EXPECT_THAT(error_of("d_um 30\n"), HasSubstr("line 1"));
  EXPECT_THAT(error_of("seed =\n"), HasSubstr("missing value"));
  EXPECT_THAT(error_of("zeta_s = lots\n"), HasSubstr("line 1"));
}

TEST(Config, KnownKeysAreUniqueAndRendered) {
  const auto keys = config::known_keys();
  const auto text = config::render_config(engine::SimConfig{});
  for (const auto& k : keys) EXPECT_THAT(text, HasSubstr(k + " = "));
  EXPECT_EQ(std::set<std::string>(keys.begin(), keys.end()).size(), keys.size());
}

TEST(Config, NumberList) {
  EXPECT_EQ(config::parse_number_list("26.5, 35.4,44.2"), (std::vector<double>{26.5, 35.4, 44.2}));
  EXPECT_THROW(config::parse_number_list("1,,2"), Error);
  EXPECT_THROW(config::parse_number_list("x"), Error);
}
