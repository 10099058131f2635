#include <gtest/gtest.h>

#include <cmath>

#include "mctcp/channel/reliability.hpp"
#include "mctcp/error.hpp"

using namespace mctcp::channel;

namespace {

// P(X >= k) by forward recursion of the pmf in long double.
double brute_tail(std::int64_t n, double p, std::int64_t k) {
  long double pmf = std::pow(1.0L - p, static_cast<long double>(n));
  long double below = 0.0L;
  for (std::int64_t i = 0; i < k; ++i) {
    below += pmf;
    pmf *= static_cast<long double>(n - i) / (i + 1) * p / (1.0L - p);
  }
  return static_cast<double>(1.0L - below);
}

}  // namespace

TEST(Reliability, BinomialTailMatchesBruteForce) {
  for (std::int64_t n : {10, 200, 1500, 4000}) {
    for (double p : {0.003, 0.0235, 0.2}) {
      for (std::int64_t k : {1, 5, 34}) {
        EXPECT_NEAR(p_correct_symbol(n, p, k), brute_tail(n, p, k), 1e-10)
            << n << " " << p << " " << k;
      }
    }
  }
}

TEST(Reliability, BinomialTailEdgeCases) {
  EXPECT_DOUBLE_EQ(p_correct_symbol(100, 0.5, 0), 1.0);
  EXPECT_DOUBLE_EQ(p_correct_symbol(10, 0.5, 11), 0.0);
  EXPECT_DOUBLE_EQ(p_correct_symbol(10, 0.0, 1), 0.0);
  EXPECT_DOUBLE_EQ(p_correct_symbol(10, 1.0, 10), 1.0);
}

TEST(Reliability, WindowMassInterpolation) {
  const auto t = WindowMassTable::reference();
  EXPECT_DOUBLE_EQ(t.at(26.5e-6), 0.889);
  EXPECT_DOUBLE_EQ(t.at(61.9e-6), 0.6613);
  EXPECT_NEAR(t.at(44.2e-6), 0.889 + (0.6613 - 0.889) * 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(t.at(10e-6), 0.889);
  EXPECT_DOUBLE_EQ(t.at(90e-6), 0.6613);
}

TEST(Reliability, RangingTableWithReferenceAnchors) {
  ReliabilityModel m;
  m.receiver = {2.5e-6, 10000, 4e-9, 200e-6};
  const double ds[] = {26.5e-6, 35.4e-6, 44.2e-6, 53.0e-6, 61.9e-6};
  const std::int64_t expected[] = {2000, 4000, 6000, 9000, 14000};
  for (int i = 0; i < 5; ++i) {
    const auto b = min_burst_for_reliability(m, ds[i], 0.9, 1000, 20);
    EXPECT_EQ(b, expected[i]) << ds[i];
    EXPECT_GE(p_correct_symbol(b, m.p_hit(ds[i]), 34), 0.9);
    EXPECT_LT(p_correct_symbol(b - 1000, m.p_hit(ds[i]), 34), 0.9);
  }
}

TEST(Reliability, RejectsBadTargets) {
  ReliabilityModel m;
  EXPECT_THROW(min_burst_for_reliability(m, 26.5e-6, 1.0, 1000, 20), mctcp::InvalidParameter);
  EXPECT_THROW(min_burst_for_reliability(m, 61.9e-6, 0.9, 100, 2), mctcp::OutOfRange);
}
