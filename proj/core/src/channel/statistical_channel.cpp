#include "mctcp/channel/statistical_channel.hpp"

#include <algorithm>

#include "mctcp/error.hpp"

namespace mctcp::channel {

ArrivalSampler::ArrivalSampler(const ChannelStats& stats)
    : p_assim_(stats.p_assim), bin_width_(stats.bin_width_s) {
  stats.validate();
  const double total = static_cast<double>(stats.total_count());
  cumulative_.reserve(stats.pdf_counts.size());
  std::uint64_t run = 0;
  for (auto c : stats.pdf_counts) {
    run += c;
    cumulative_.push_back(static_cast<double>(run) / total);
  }
  cumulative_.back() = 1.0;
}

double ArrivalSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto bin = static_cast<std::size_t>(
      std::min<std::ptrdiff_t>(it - cumulative_.begin(), std::ssize(cumulative_) - 1));
  return (static_cast<double>(bin) + rng.uniform_open()) * bin_width_;
}

double ArrivalSampler::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  const double x = t / bin_width_;
  const auto bin = static_cast<std::size_t>(x);
  if (bin >= cumulative_.size()) return 1.0;
  const double below = bin == 0 ? 0.0 : cumulative_[bin - 1];
  return below + (x - static_cast<double>(bin)) * (cumulative_[bin] - below);
}

std::vector<double> statistical_transmit(std::int64_t q, const ArrivalSampler& sampler,
                                         Rng& rng) {
  if (q < 0) throw InvalidParameter("burst size must be >= 0");
  std::vector<double> delays;
  if (q == 0) return delays;
  const std::int64_t k = rng.binomial(q, sampler.p_assim());
  delays.reserve(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) delays.push_back(sampler.sample(rng));
  return delays;
}

std::vector<double> statistical_transmit(std::int64_t q, const ChannelStats& stats, Rng& rng) {
  return statistical_transmit(q, ArrivalSampler(stats), rng);
}

StatisticalChannel::StatisticalChannel(const ChannelStats& s_to_rx, const ChannelStats& r_to_tx,
                                       std::uint64_t seed)
    : s_(s_to_rx), r_(r_to_tx), rng_(seed) {}

Delivery StatisticalChannel::transmit(Species species, std::int64_t count, double t_emit,
                                      double horizon_s) {
  const auto delays = statistical_transmit(count, species == Species::S ? s_ : r_, rng_);
  Delivery out;
  out.arrival_times.reserve(delays.size());
  for (double dly : delays) {
    const double t = t_emit + dly;
    if (t <= horizon_s) {
      out.arrival_times.push_back(t);
    } else {
      ++out.lost;
    }
  }
  out.lost += count - static_cast<std::int64_t>(delays.size());
  return out;
}

}  // namespace mctcp::channel
