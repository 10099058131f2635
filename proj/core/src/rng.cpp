#include "mctcp/rng.hpp"

#include <cmath>

#include "mctcp/error.hpp"

namespace mctcp {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidParameter("Rng::below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw InvalidParameter("Rng::binomial: need n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);

  const double q = 1.0 - p;
  const double odds = p / q;
  const double nd = static_cast<double>(n);
  const double u = uniform();

  if (nd * p < 30.0) {
    double pk = std::exp(nd * std::log1p(-p));
    double cdf = pk;
    std::int64_t k = 0;
    while (u >= cdf && k < n) {
      pk *= (nd - static_cast<double>(k)) / static_cast<double>(k + 1) * odds;
      ++k;
      cdf += pk;
      if (pk == 0.0) break;
    }
    return k;
  }

  std::int64_t mode = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  if (mode > n) mode = n;
  const double md = static_cast<double>(mode);
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                        std::lgamma(nd - md + 1.0) + md * std::log(p) +
                        (nd - md) * std::log1p(-p);
  const double pm = std::exp(log_pm);
  double acc = pm;
  if (u < acc) return mode;

  std::int64_t lo = mode - 1;
  std::int64_t hi = mode + 1;
  double p_lo = mode > 0 ? pm * md / (nd - md + 1.0) / odds : 0.0;
  double p_hi = mode < n ? pm * (nd - md) / (md + 1.0) * odds : 0.0;
  for (;;) {
    if (p_lo == 0.0 && p_hi == 0.0) return mode;
    if (p_hi >= p_lo) {
      acc += p_hi;
      if (u < acc) return hi;
      const double h = static_cast<double>(hi);
      p_hi = hi < n ? p_hi * (nd - h) / (h + 1.0) * odds : 0.0;
      ++hi;
    } else {
      acc += p_lo;
      if (u < acc) return lo;
      const double l = static_cast<double>(lo);
      p_lo = lo > 0 ? p_lo * l / (nd - l + 1.0) / odds : 0.0;
      --lo;
    }
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 1));
}

}  // namespace mctcp
