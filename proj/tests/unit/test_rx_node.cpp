#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "mctcp/error.hpp"
#include "mctcp/rx_node.hpp"

using namespace mctcp;
using rx::RxParams;
using rx::RxState;

namespace {

RxState established(double rtt) {
  RxState s;
  s.phase = rx::RxPhase::ConnectionEstablished;
  s.rtt = rtt;
  s.halve_anchor_time = 0.0;
  s.halve_anchor_count = 0;
  return s;
}

}  // namespace

TEST(RxNode, EstimateRtt) {
  EXPECT_DOUBLE_EQ(rx::estimate_rtt(20.0, 25.5), 5.5);
  EXPECT_THROW(rx::estimate_rtt(20.0, 20.0), InvalidParameter);
  EXPECT_THROW(rx::estimate_rtt(20.0, 19.0), InvalidParameter);
}

TEST(RxNode, RangingWithoutTransmitterExhaustsAttempts) {
  const RxParams params;
  const codec::CodecParams codec;
  RxState s;
  std::vector<rx::Send> sends;
  std::optional<double> gave_up;
  for (int k = 0; k <= 1700000 && !gave_up; ++k) {
    const double t = k * 1e-3;
    const auto step = rx::rx_step(s, t, 0, k == 0, params, codec);
    if (step.send) sends.push_back(*step.send);
    if (step.gave_up) gave_up = t;
  }
  ASSERT_TRUE(gave_up);
  ASSERT_EQ(sends.size(), 20u);
  for (std::size_t i = 0; i < sends.size(); ++i) {
    EXPECT_EQ(sends[i].message, codec::Message::Start);
    EXPECT_EQ(sends[i].burst, 1000 * static_cast<std::int64_t>(i + 1));
    // 3 START slots plus the 54 s timeout per attempt.
    EXPECT_NEAR(sends[i].start, 84.0 * i, 1e-6);
  }
  EXPECT_NEAR(*gave_up, 84.0 * 20, 1e-6);
  EXPECT_EQ(s.r_emitted, 2 * 1000 * (20 * 21 / 2));
  EXPECT_EQ(s.outcome, rx::RxOutcome::AttemptsExhausted);
  EXPECT_EQ(s.phase, rx::RxPhase::Idle);
}

TEST(RxNode, RttFromFinalStartSlot) {
  const RxParams params;
  const codec::CodecParams codec;
  RxState s;
  rx::rx_step(s, 0.0, 0, true, params, codec);
  EXPECT_FALSE(rx::rx_step(s, 24.0, 4, false, params, codec).established);
  EXPECT_TRUE(rx::rx_step(s, 25.0, 1, false, params, codec).established);
  EXPECT_DOUBLE_EQ(s.rtt, 5.0);
  EXPECT_DOUBLE_EQ(s.established_at, 25.0);
  EXPECT_EQ(s.halve_anchor_count, 5);

  RxState early;
  rx::rx_step(early, 0.0, 0, true, params, codec);
  EXPECT_TRUE(rx::rx_step(early, 15.0, 5, false, params, codec).established);
  EXPECT_DOUBLE_EQ(early.rtt, 15.0);
}

TEST(RxNode, StopOnTarget) {
  const RxParams params;
  const codec::CodecParams codec;
  auto s = established(5.0);
  s.total_assimilated = 10000;
  EXPECT_EQ(rx::control_tick(s, 1.0, params, codec), codec::Message::Stop);
  EXPECT_FALSE(s.stop_estimate);
}

TEST(RxNode, StopByQuadraticProjection) {
  const RxParams params;
  const codec::CodecParams codec;
  auto s = established(5.0);
  s.total_assimilated = 1000;
  // a = 1000 / 10^2 = 10; t_new = 10 + 20 + 5 = 35; 0.95 * 10 * 35^2 = 11637.5.
  EXPECT_EQ(rx::control_tick(s, 10.0, params, codec), codec::Message::Stop);
  EXPECT_TRUE(s.stop_estimate);
  EXPECT_DOUBLE_EQ(s.quad_coeff, 10.0);
}

TEST(RxNode, HalveWhenGrowthFallsBehind) {
  const RxParams params;
  const codec::CodecParams codec;
  auto s = established(5.0);
  s.total_assimilated = 300;
  // a = 3, projection 0.95 * 3 * 35^2 = 3491 < 10000; no previous coefficient.
  EXPECT_EQ(rx::control_tick(s, 10.0, params, codec), std::nullopt);
  s.total_assimilated = 400;
  // a = 1, projection 1923.75; expected 0.95 * 3 * 20^2 = 1140 > 400.
  EXPECT_EQ(rx::control_tick(s, 20.0, params, codec), codec::Message::Halve);
  EXPECT_TRUE(s.halve_estimate);
}

TEST(RxNode, NoEstimateBelowHalveThreshold) {
  const RxParams params;
  const codec::CodecParams codec;
  auto s = established(5.0);
  s.total_assimilated = 100;
  EXPECT_EQ(rx::control_tick(s, 10.0, params, codec), std::nullopt);
  s.total_assimilated = 101;
  EXPECT_EQ(rx::control_tick(s, 20.0, params, codec), std::nullopt);
  EXPECT_TRUE(s.has_coeff);
}

TEST(RxNode, EstimationSuspendedWhileSendingOrWaitingForHalve) {
  const RxParams params;
  const codec::CodecParams codec;
  auto s = established(5.0);
  s.total_assimilated = 10000;
  s.last_send_end = 12.0;
  EXPECT_EQ(rx::control_tick(s, 11.0, params, codec), std::nullopt);
  s.last_send_end = 0.0;
  s.halve_anchor_time = 11.5;
  EXPECT_EQ(rx::control_tick(s, 11.0, params, codec), std::nullopt);
  s.halve_anchor_time = 0.0;
  s.anchor_pending = true;
  EXPECT_EQ(rx::control_tick(s, 11.0, params, codec), std::nullopt);
}

TEST(RxNode, HalveAnchorsAfterRtt) {
  RxParams params;
  const codec::CodecParams codec;
  RxState s;
  rx::rx_step(s, 0.0, 0, true, params, codec);
  rx::rx_step(s, 25.0, 5, false, params, codec);  // established, rtt = 5
  rx::rx_step(s, 35.0, 295, false, params, codec);   // N = 300, coefficient only
  EXPECT_TRUE(s.has_coeff);
  const auto step = rx::rx_step(s, 45.0, 0, false, params, codec);
  ASSERT_TRUE(step.send);
  EXPECT_EQ(step.send->message, codec::Message::Halve);
  EXPECT_EQ(s.halve_count, 1);
  EXPECT_DOUBLE_EQ(s.halve_anchor_time, 45.0 + 10.0 + 5.0);
  rx::rx_step(s, 60.0, 50, false, params, codec);
  EXPECT_FALSE(s.anchor_pending);
  EXPECT_EQ(s.halve_anchor_count, 350);
  EXPECT_FALSE(s.has_coeff);
}

TEST(RxNode, ReleaseEndsAfterStopTransmission) {
  const RxParams params;
  const codec::CodecParams codec;
  RxState s;
  rx::rx_step(s, 0.0, 0, true, params, codec);
  rx::rx_step(s, 25.0, 10000, false, params, codec);
  // The START transmission still occupies the channel until t = 30.
  EXPECT_FALSE(rx::rx_step(s, 25.2, 0, false, params, codec).send);
  const auto stop = rx::rx_step(s, 30.0, 0, false, params, codec);
  ASSERT_TRUE(stop.send);
  EXPECT_EQ(stop.send->message, codec::Message::Stop);
  EXPECT_EQ(stop.send->burst, 1000);
  EXPECT_EQ(s.phase, rx::RxPhase::ConnectionRelease);
  EXPECT_FALSE(rx::rx_step(s, 59.9, 0, false, params, codec).released);
  EXPECT_TRUE(rx::rx_step(s, 60.0, 0, false, params, codec).released);
  EXPECT_EQ(s.outcome, rx::RxOutcome::Stopped);
}

TEST(RxNode, ValidateThresholdOrdering) {
  RxParams p;
  p.halve_threshold = 20000;
  EXPECT_THROW(p.validate(), InvalidParameter);
}
