#pragma once

#include <span>
#include <vector>

namespace tvlad::stats {

double chi2_cdf(double x, double df);
/// Upper tail P(X > x).
double chi2_sf(double x, double df);
/// x with P(X > x) = upper_tail.
double chi2_upper_quantile(double upper_tail, double df);

double normal_quantile(double p);

double mean(std::span<const double> xs);
/// Sample variance with denominator n - 1.
double variance(std::span<const double> xs);
double median(std::vector<double> xs);
/// Empirical quantile, Hyndman-Fan type 7 (linear interpolation).
double quantile_type7(std::vector<double> xs, double q);

struct JarqueBera {
  double statistic;
  double p_value;
};
JarqueBera jarque_bera(std::span<const double> xs);

}  // namespace tvlad::stats
