#include "tvlad/weights.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tvlad/errors.hpp"
#include "tvlad/rng.hpp"
#include "tvlad/stats.hpp"

namespace tvlad {
namespace {

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void require_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DataError("weight function received a non-finite lag vector");
  }
}

double cutoff_of(const WeightSpec& spec) {
  if (!spec.c) throw ConfigError("smooth_indicator weight has no resolved cutoff; call resolve_weight first");
  return *spec.c;
}

}  // namespace

WeightSpec WeightSpec::ling(double c) {
  if (!(c > 0.0)) throw ConfigError("ling weight constant c must be positive");
  return WeightSpec{WeightVariant::LingPower, c, std::nullopt};
}

WeightSpec WeightSpec::smooth_indicator(double c) {
  if (!(c > 0.0)) throw ConfigError("smooth_indicator cutoff c must be positive");
  return WeightSpec{WeightVariant::SmoothIndicator, c, std::nullopt};
}

WeightSpec WeightSpec::smooth_indicator_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("smooth_indicator quantile level must lie in (0, 1)");
  return WeightSpec{WeightVariant::SmoothIndicator, std::nullopt, q};
}

WeightSpec WeightSpec::pan() { return WeightSpec{WeightVariant::PanDecay, std::nullopt, std::nullopt}; }

WeightSpec WeightSpec::unit() { return WeightSpec{WeightVariant::Unit, std::nullopt, std::nullopt}; }

std::string WeightSpec::name() const {
  switch (variant) {
    case WeightVariant::LingPower: return "ling";
    case WeightVariant::SmoothIndicator: return "smooth_indicator";
    case WeightVariant::PanDecay: return "pan";
    case WeightVariant::Unit: return "unit";
  }
  return "unknown";
}

double smooth_step(double u) {
  if (u <= -1.0) return 0.0;
  if (u > 1.0) return 1.0;
  return -0.25 * u * u * u + 0.75 * u + 0.5;
}

double smooth_step_derivative(double u) {
  if (u <= -1.0 || u > 1.0) return 0.0;
  return 0.75 * (1.0 - u * u);
}

double weight_value(const WeightSpec& spec, std::span<const double> lag_vector,
                    std::optional<std::span<const double>> full_past) {
  require_finite(lag_vector);
  switch (spec.variant) {
    case WeightVariant::LingPower: {
      const double base = 1.0 + *spec.c * squared_norm(lag_vector);
      return 1.0 / (base * std::sqrt(base));
    }
    case WeightVariant::SmoothIndicator:
      return smooth_step(cutoff_of(spec) - std::sqrt(squared_norm(lag_vector)));
    case WeightVariant::PanDecay: {
      if (!full_past) throw ConfigError("pan weight requires the full past of the series");
      const auto past = *full_past;
      const std::size_t n = past.size();
      double acc = 0.0;
      // k = 1 is the most recent observation Y_{t-1}.
      for (std::size_t k = 1; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        acc += std::abs(past[n - k]) / (dk * dk * dk);
      }
      const double base = 1.0 + acc;
      return 1.0 / (base * base);
    }
    case WeightVariant::Unit:
      return 1.0;
  }
  return 1.0;
}

Eigen::VectorXd weight_gradient(const WeightSpec& spec, std::span<const double> lag_vector) {
  const auto p = static_cast<Eigen::Index>(lag_vector.size());
  Eigen::Map<const Eigen::VectorXd> x(lag_vector.data(), p);
  switch (spec.variant) {
    case WeightVariant::LingPower: {
      const double c = *spec.c;
      const double base = 1.0 + c * x.squaredNorm();
      return (-3.0 * c / (base * base * std::sqrt(base))) * x;
    }
    case WeightVariant::SmoothIndicator: {
      const double norm = x.norm();
      if (norm == 0.0) return Eigen::VectorXd::Zero(p);
      return (-smooth_step_derivative(cutoff_of(spec) - norm) / norm) * x;
    }
    case WeightVariant::Unit:
      return Eigen::VectorXd::Zero(p);
    case WeightVariant::PanDecay:
      break;
  }
  throw ConfigError("pan weight is not a function of the lag vector and has no gradient");
}

QuantileCutoff resolve_quantile_cutoff(std::span<const double> series, double q) {
  if (series.empty()) throw DataError("cannot resolve a quantile cutoff on an empty series");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
  std::vector<double> magnitudes(series.size());
  std::transform(series.begin(), series.end(), magnitudes.begin(), [](double v) { return std::abs(v); });
  const double value = stats::quantile_type7(std::move(magnitudes), q);
  return {value, value == 0.0};
}

WeightSpec resolve_weight(const WeightSpec& spec, std::span<const double> series) {
  if (spec.variant != WeightVariant::SmoothIndicator || spec.c) return spec;
  if (!spec.q) throw ConfigError("smooth_indicator weight needs either c or q");
  WeightSpec out = spec;
  out.c = resolve_quantile_cutoff(series, *spec.q).value;
  return out;
}

SupremumReport assumption3_supremum(const WeightSpec& spec, std::size_t p, double radius, std::size_t grid_points) {
  if (spec.variant == WeightVariant::PanDecay) {
    throw ConfigError("pan weight is not a function of a p-vector; assumption check unsupported");
  }
  if (!(radius > 0.0) || p == 0 || grid_points < 2) throw ConfigError("invalid assumption-3 probe settings");

  // Structured directions (axes and the diagonal) plus seeded random ones.
  std::vector<Eigen::VectorXd> directions;
  for (std::size_t i = 0; i < p; ++i) directions.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(i)));
  directions.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p)).normalized());
  Rng rng(0xA55);
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(p));
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = rng.normal();
    directions.push_back(d.normalized());
  }

  std::vector<double> norms{0.0};
  for (std::size_t i = 1; i <= grid_points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(grid_points);
    norms.push_back(radius * frac);
    norms.push_back(std::min(radius, 1e-3 * std::pow(radius / 1e-3, frac)));
  }
  std::sort(norms.begin(), norms.end());

  constexpr double step = 1e-6;
  const auto probe = [&](const Eigen::VectorXd& x) {
    const double g = weight_value(spec, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
    Eigen::VectorXd grad(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd hi = x, lo = x;
      hi[i] += step;
      lo[i] -= step;
      grad[i] = (weight_value(spec, std::span<const double>(hi.data(), static_cast<std::size_t>(hi.size()))) -
                 weight_value(spec, std::span<const double>(lo.data(), static_cast<std::size_t>(lo.size())))) /
                (2.0 * step);
    }
    const double r = x.norm();
    return g * (1.0 + r * r * r) + grad.norm() * (r + r * r);
  };

  SupremumReport report;
  for (const auto& dir : directions) {
    for (double r : norms) {
      const double value = probe(r * dir);
      if (value > report.sup_estimate) {
        report.sup_estimate = value;
        report.argmax_norm = r;
      }
      if (r <= 0.5 * radius) {
        report.inner_max = std::max(report.inner_max, value);
      } else {
        report.outer_max = std::max(report.outer_max, value);
      }
    }
  }
  report.finite = report.outer_max <= report.inner_max * (1.0 + 1e-6);
  return report;
}

double kernel_value(const KernelSpec& kernel, double x) {
  const double z = x / kernel.support;
  if (std::abs(z) > 1.0) return 0.0;
  return 0.75 * (1.0 - z * z) / kernel.support;
}

double kernel_moment(const KernelSpec& kernel, int m, int j) {
  if (m < 1 || m > 2 || j < 0 || j > 2) throw ConfigError("kernel moment needs m in {1,2} and j in {0,1,2}");
  const auto integrand = [&](double v) { return std::pow(kernel_value(kernel, v), m) * std::pow(v, j); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, -kernel.support, kernel.support,
                                                                       15, 1e-14, &err);
}

}  // namespace tvlad
