#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tvlad {

enum class TailSide { Left, Right };

const char* to_string(TailSide side);

/// Hill estimate from the k largest exceedances of one tail. The right tail
/// keeps y > 0; the left tail keeps -y for y < 0.
double hill_estimate(std::span<const double> series, std::size_t k, TailSide side);

struct HillCurve {
  std::vector<std::size_t> k_values;
  std::vector<double> estimates;
  TailSide side = TailSide::Right;
  std::size_t n_used = 0;  ///< positive exceedances after side selection
  /// Median over the upper third of k against the lower third; false when the
  /// ratio leaves [0.8, 1.25].
  bool plateau = false;
  double plateau_median = 0.0;  ///< median of all estimates
};

/// k = k_min, k_min + step, ... up to min(k_max, n_used - 1).
HillCurve hill_curve(std::span<const double> series, std::size_t k_min, std::size_t k_max, std::size_t step,
                     TailSide side);

}  // namespace tvlad
