#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "mctcp/tx_node.hpp"

using namespace mctcp;
using tx::TxParams;
using tx::TxState;

namespace {

// n arrivals on consecutive engine ticks starting at tick k0 (1 ms ticks).
std::vector<double> burst_at(int k0, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back((k0 + i) * 1e-3);
  return v;
}

}  // namespace

TEST(TxNode, DecodesStartAndStartsLinearEmission) {
  const codec::CodecParams codec;
  const TxParams params;
  TxState s(codec);
  auto arrivals = burst_at(1000, 40);
  const auto second = burst_at(11000, 40);
  arrivals.insert(arrivals.end(), second.begin(), second.end());

  std::size_t next = 0;
  std::optional<double> decoded_at;
  std::vector<std::pair<double, std::int64_t>> emits;
  for (int k = 0; k <= 23000; ++k) {
    const double t = k * 1e-3;
    std::size_t end = next;
    while (end < arrivals.size() && arrivals[end] <= t + 1e-9) ++end;
    const auto step = tx::tx_step(s, t, std::span(arrivals).subspan(next, end - next), params, codec);
    next = end;
    if (step.decoded) {
      EXPECT_EQ(*step.decoded, codec::Message::Start);
      decoded_at = t;
    }
    if (step.emit) emits.push_back({t, step.emit});
  }
  ASSERT_TRUE(decoded_at);
  // t* = 1.033, t_sync = 1.533 (count 40 > 34), reads at 11.533 and 21.533.
  EXPECT_NEAR(*decoded_at, 21.533, 1e-9);
  ASSERT_GE(emits.size(), 3u);
  EXPECT_NEAR(emits[0].first, 21.553, 1e-9);
  for (std::size_t i = 0; i < emits.size(); ++i) {
    EXPECT_EQ(emits[i].second, static_cast<std::int64_t>(i) + 1);
  }
  EXPECT_EQ(s.phase(), tx::TxPhase::Emitting);
}

TEST(TxNode, CumulativeEmissionIsTriangular) {
  const codec::CodecParams codec;
  TxParams params;
  params.max_total = std::int64_t{1} << 40;
  TxState s(codec);
  s.emitting = true;
  s.current_burst = 1;
  s.next_emission = 0.02;
  for (std::int64_t n = 1; n <= 3000; ++n) {
    const auto step = tx::tx_step(s, n * 0.02, {}, params, codec);
    ASSERT_EQ(step.emit, n);
    ASSERT_EQ(s.total_emitted, n * (n + 1) / 2);
  }
}

TEST(TxNode, HalveHalvesNextBurstThenGrowsLinearly) {
  const codec::CodecParams codec;
  const TxParams params;
  TxState s(codec);
  s.emitting = true;
  s.current_burst = 100;
  s.next_emission = 0.02;
  s.sync.phase = codec::SyncPhase::Synchronized;
  s.decoder.pattern = "1";
  s.decoder.symbols_read = 1;
  s.decoder.next_read = 0.0;
  const auto d = tx::tx_step(s, 0.0, {}, params, codec);
  ASSERT_EQ(d.decoded, codec::Message::Halve);
  std::vector<std::int64_t> out;
  for (int k = 1; k <= 3; ++k) out.push_back(tx::tx_step(s, k * 0.02, {}, params, codec).emit);
  EXPECT_EQ(out, (std::vector<std::int64_t>{50, 51, 52}));

  s.current_burst = 1;
  s.sync.phase = codec::SyncPhase::Synchronized;
  s.decoder.pattern = "1";
  s.decoder.next_read = 0.1;
  const auto floor = tx::tx_step(s, 0.1, {}, params, codec);
  ASSERT_EQ(floor.decoded, codec::Message::Halve);
  EXPECT_EQ(floor.emit, 1);
}

TEST(TxNode, StopEndsEmission) {
  const codec::CodecParams codec;
  const TxParams params;
  TxState s(codec);
  s.emitting = true;
  s.current_burst = 10;
  s.next_emission = 0.0;
  s.sync.phase = codec::SyncPhase::Synchronized;
  s.decoder.pattern = "11";
  s.decoder.symbols_read = 2;
  s.decoder.next_read = 0.0;
  const auto arrivals = burst_at(-1000, 40);
  const auto d = tx::tx_step(s, 0.0, arrivals, params, codec);
  EXPECT_EQ(d.decoded, codec::Message::Stop);
  EXPECT_EQ(d.emit, 0);
  for (int k = 1; k < 1000; ++k) EXPECT_EQ(tx::tx_step(s, k * 1e-3, {}, params, codec).emit, 0);
  EXPECT_FALSE(s.emitting);
}

TEST(TxNode, CapEndsEmission) {
  const codec::CodecParams codec;
  TxParams params;
  params.max_total = 8;
  TxState s(codec);
  s.emitting = true;
  s.current_burst = 1;
  s.next_emission = 0.02;
  std::vector<std::int64_t> out;
  bool capped = false;
  for (int k = 1; k <= 10; ++k) {
    const auto step = tx::tx_step(s, k * 0.02, {}, params, codec);
    if (step.emit) out.push_back(step.emit);
    capped = capped || step.reached_cap;
  }
  EXPECT_EQ(out, (std::vector<std::int64_t>{1, 2, 3, 2}));
  EXPECT_TRUE(capped);
  EXPECT_EQ(s.total_emitted, 8);
}

TEST(TxNode, ExpectedMessagesByPhase) {
  EXPECT_TRUE(tx::expected_messages(tx::TxPhase::Idle).contains(codec::Message::Start));
  EXPECT_EQ(tx::expected_messages(tx::TxPhase::Emitting),
            (codec::MessageSet{codec::Message::Halve, codec::Message::Stop}));
}
