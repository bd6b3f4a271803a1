#include "tvlad/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tvlad/errors.hpp"
#include "tvlad/stats.hpp"

namespace tvlad {
namespace {

/// Positive exceedances of the chosen tail, sorted descending.
std::vector<double> tail_sample(std::span<const double> series, TailSide side) {
  std::vector<double> out;
  for (double y : series) {
    if (!std::isfinite(y)) throw DataError("Hill estimator received a non-finite value");
    const double v = side == TailSide::Right ? y : -y;
    if (v > 0.0) out.push_back(v);
  }
  std::stable_sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double hill_from_sorted(const std::vector<double>& x, std::size_t k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(x[i] / x[k]);
  if (!(acc > 0.0)) throw NumericError("Hill estimate undefined: the top order statistics are tied");
  return static_cast<double>(k) / acc;
}

}  // namespace

const char* to_string(TailSide side) { return side == TailSide::Left ? "left" : "right"; }

double hill_estimate(std::span<const double> series, std::size_t k, TailSide side) {
  if (k == 0) throw ConfigError("Hill estimator needs k >= 1");
  const std::vector<double> x = tail_sample(series, side);
  if (k + 1 > x.size()) throw DataError("too few exceedances in the requested tail for this k");
  return hill_from_sorted(x, k);
}

HillCurve hill_curve(std::span<const double> series, std::size_t k_min, std::size_t k_max, std::size_t step,
                     TailSide side) {
  if (k_min == 0 || step == 0) throw ConfigError("Hill curve needs k_min >= 1 and step >= 1");
  const std::vector<double> x = tail_sample(series, side);
  HillCurve out;
  out.side = side;
  out.n_used = x.size();
  const std::size_t top = x.empty() ? 0 : std::min(k_max, x.size() - 1);
  for (std::size_t k = k_min; k <= top; k += step) {
    out.k_values.push_back(k);
    out.estimates.push_back(hill_from_sorted(x, k));
  }
  if (out.k_values.empty()) throw DataError("Hill curve k range is empty after clipping to the sample");

  out.plateau_median = stats::median(out.estimates);
  const std::size_t third = out.estimates.size() / 3;
  if (third == 0) {
    out.plateau = true;
  } else {
    const auto first = out.estimates.begin();
    const double low = stats::median(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(third)));
    const double high = stats::median(std::vector<double>(out.estimates.end() - static_cast<std::ptrdiff_t>(third),
                                                          out.estimates.end()));
    const double ratio = high / low;
    out.plateau = ratio >= 0.8 && ratio <= 1.25;
  }
  return out;
}

}  // namespace tvlad
