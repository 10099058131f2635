#include "mctcp/channel/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/error.hpp"

namespace mctcp::channel {

namespace {

double log_binomial_pmf(double n, double k, double log_p, double log_q) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_p +
         (n - k) * log_q;
}

constexpr double kNegligible = 1e-18;

}  // namespace

double p_correct_symbol(std::int64_t q, double p_hit, std::int64_t threshold) {
  if (q < 0) throw InvalidParameter("burst size must be >= 0");
  if (!(p_hit >= 0.0 && p_hit <= 1.0)) throw InvalidParameter("p_hit must lie in [0, 1]");
  if (threshold <= 0) return 1.0;
  if (threshold > q) return 0.0;
  if (p_hit == 0.0) return 0.0;
  if (p_hit == 1.0) return 1.0;

  const double n = static_cast<double>(q);
  const double log_p = std::log(p_hit);
  const double log_q = std::log1p(-p_hit);
  const double odds = p_hit / (1.0 - p_hit);
  const double mean = n * p_hit;

  // Sum whichever tail lies away from the bulk, walking outward from the
  // threshold so the terms shrink monotonically.
  if (static_cast<double>(threshold) > mean) {
    double term = std::exp(log_binomial_pmf(n, static_cast<double>(threshold), log_p, log_q));
    double sum = 0.0;
    for (std::int64_t k = threshold; k <= q; ++k) {
      sum += term;
      if (term < kNegligible * sum) break;
      const double kd = static_cast<double>(k);
      term *= (n - kd) / (kd + 1.0) * odds;
    }
    return std::clamp(sum, 0.0, 1.0);
  }

  const std::int64_t top = threshold - 1;
  double term = std::exp(log_binomial_pmf(n, static_cast<double>(top), log_p, log_q));
  double lower = 0.0;
  for (std::int64_t k = top; k >= 0; --k) {
    lower += term;
    if (term < kNegligible * lower) break;
    const double kd = static_cast<double>(k);
    term *= kd / (n - kd + 1.0) / odds;
  }
  return std::clamp(1.0 - lower, 0.0, 1.0);
}

WindowMassTable::WindowMassTable(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {
  if (anchors_.empty()) throw InvalidParameter("window mass table needs at least one anchor");
  for (const auto& [d, m] : anchors_) {
    if (!(d > 0.0)) throw InvalidParameter("window mass anchor distance must be > 0");
    if (!(m >= 0.0 && m <= 1.0)) throw InvalidParameter("window mass must lie in [0, 1]");
  }
  std::sort(anchors_.begin(), anchors_.end());
}

WindowMassTable WindowMassTable::reference() {
  return WindowMassTable({{26.5e-6, 0.889}, {61.9e-6, 0.6613}});
}

WindowMassTable WindowMassTable::from_stats(std::span<const ChannelStats> stats, Species species) {
  std::vector<std::pair<double, double>> anchors;
  for (const auto& s : stats) {
    if (s.species == species) anchors.emplace_back(s.distance_m, s.window_mass);
  }
  if (anchors.empty()) {
    throw MissingCalibration("no channel statistics for species " +
                             std::string(to_string(species)));
  }
  return WindowMassTable(std::move(anchors));
}

double WindowMassTable::at(double distance_m) const {
  if (anchors_.empty()) throw InvalidParameter("empty window mass table");
  if (distance_m <= anchors_.front().first) return anchors_.front().second;
  if (distance_m >= anchors_.back().first) return anchors_.back().second;
  const auto hi = std::upper_bound(anchors_.begin(), anchors_.end(), distance_m,
                                   [](double d, const auto& a) { return d < a.first; });
  const auto lo = hi - 1;
  const double w = (distance_m - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

double ReliabilityModel::p_hit(double distance_m) const {
  return p_assim(receiver.receptor_count, distance_m, receiver, fit) * window_mass.at(distance_m);
}

std::int64_t min_burst_for_reliability(const ReliabilityModel& model, double distance_m,
                                       double target_pc, std::int64_t increment,
                                       int max_multiples) {
  if (!(target_pc > 0.0 && target_pc < 1.0)) {
    throw InvalidParameter("target probability must lie in (0, 1)");
  }
  if (increment <= 0) throw InvalidParameter("burst increment must be > 0");
  if (max_multiples < 1) throw InvalidParameter("max_multiples must be >= 1");
  const double p = model.p_hit(distance_m);
  for (int m = 1; m <= max_multiples; ++m) {
    const std::int64_t burst = m * increment;
    if (p_correct_symbol(burst, p, model.threshold) >= target_pc) return burst;
  }
  throw OutOfRange("no burst up to " + std::to_string(max_multiples * increment) +
                   " molecules reaches P_C >= " + std::to_string(target_pc) + " at d = " +
                   std::to_string(distance_m * 1e6) + " um");
}

}  // namespace mctcp::channel
