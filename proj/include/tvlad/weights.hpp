#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace tvlad {

enum class WeightVariant { LingPower, SmoothIndicator, PanDecay, Unit };

/// Self-weight function g applied to the lag vector X_{t-1} (or to the whole
/// past for PanDecay). Every variant maps into (0, 1].
struct WeightSpec {
  WeightVariant variant = WeightVariant::Unit;
  /// LingPower constant, or the SmoothIndicator cutoff once resolved.
  std::optional<double> c;
  /// SmoothIndicator quantile level, resolved against |Y| of a dataset.
  std::optional<double> q;

  static WeightSpec ling(double c);
  static WeightSpec smooth_indicator(double c);
  static WeightSpec smooth_indicator_quantile(double q);
  static WeightSpec pan();
  static WeightSpec unit();

  bool needs_full_past() const noexcept { return variant == WeightVariant::PanDecay; }
  bool differentiable() const noexcept {
    return variant == WeightVariant::LingPower || variant == WeightVariant::SmoothIndicator ||
           variant == WeightVariant::Unit;
  }
  bool resolved() const noexcept { return variant != WeightVariant::SmoothIndicator || c.has_value(); }
  std::string name() const;
};

/// Smooth step J(u): 0 below -1, 1 above 1, cubic -0.25u^3 + 0.75u + 0.5 between.
double smooth_step(double u);
double smooth_step_derivative(double u);

/// g(x). full_past holds Y_1, ..., Y_{t-1} in time order and is required for PanDecay.
double weight_value(const WeightSpec& spec, std::span<const double> lag_vector,
                    std::optional<std::span<const double>> full_past = std::nullopt);

/// Analytic gradient of g for the p-vector variants.
Eigen::VectorXd weight_gradient(const WeightSpec& spec, std::span<const double> lag_vector);

struct QuantileCutoff {
  double value;
  bool degenerate;  ///< all |Y| zero
};

/// Type-7 empirical q-quantile of |Y_1|, ..., |Y_T|.
QuantileCutoff resolve_quantile_cutoff(std::span<const double> series, double q);

/// Fills in a SmoothIndicator cutoff from its quantile level; other specs pass through.
WeightSpec resolve_weight(const WeightSpec& spec, std::span<const double> series);

struct SupremumReport {
  double sup_estimate = 0.0;
  double argmax_norm = 0.0;
  double inner_max = 0.0;  ///< max over |x| <= radius / 2
  double outer_max = 0.0;  ///< max over radius / 2 < |x| <= radius
  bool finite = false;
};

/// Numeric probe of sup_x g(x)(1 + |x|^3) + |g'(x)|(|x| + |x|^2), with g' from
/// central differences. finite is false when the outer shell exceeds the inner region.
SupremumReport assumption3_supremum(const WeightSpec& spec, std::size_t p, double radius, std::size_t grid_points);

/// Compactly supported kernel. Only the Epanechnikov kernel 0.75(1 - x^2) on [-1, 1] is offered.
struct KernelSpec {
  double support = 1.0;
};

double kernel_value(const KernelSpec& kernel, double x);
/// int K(v)^m v^j dv, m in {1, 2}, j in {0, 1, 2}.
double kernel_moment(const KernelSpec& kernel, int m, int j);

}  // namespace tvlad
