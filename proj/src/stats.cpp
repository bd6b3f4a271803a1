#include "tvlad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "tvlad/errors.hpp"

namespace tvlad::stats {

double chi2_cdf(double x, double df) {
  if (x <= 0.0) return 0.0;
  return boost::math::cdf(boost::math::chi_squared(df), x);
}

double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

double chi2_upper_quantile(double upper_tail, double df) {
  if (!(upper_tail > 0.0 && upper_tail < 1.0)) {
    throw ConfigError("chi-square upper tail probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), upper_tail));
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal(), p);
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double median(std::vector<double> xs) { return quantile_type7(std::move(xs), 0.5); }

double quantile_type7(std::vector<double> xs, double q) {
  if (xs.empty()) throw DataError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

JarqueBera jarque_bera(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double m = mean(xs);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double skew = m3 / std::pow(m2, 1.5);
  const double kurt = m4 / (m2 * m2);
  const double jb = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
  return {jb, chi2_sf(jb, 2.0)};
}

}  // namespace tvlad::stats
