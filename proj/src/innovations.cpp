#include "tvlad/innovations.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "tvlad/errors.hpp"

namespace tvlad {

InnovationSpec::InnovationSpec(InnovationKind kind, double nu, double scale)
    : kind_(kind), nu_(nu), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("innovation scale must be positive and finite");
  }
  if (kind == InnovationKind::StudentT && (!(nu > 0.0) || !std::isfinite(nu))) {
    throw ConfigError("Student-t degrees of freedom must be positive and finite");
  }
}

InnovationSpec InnovationSpec::gaussian(double scale) {
  return InnovationSpec(InnovationKind::Gaussian, 0.0, scale);
}

InnovationSpec InnovationSpec::student_t(double nu, double scale) {
  return InnovationSpec(InnovationKind::StudentT, nu, scale);
}

InnovationSpec InnovationSpec::cauchy(double scale) {
  return InnovationSpec(InnovationKind::Cauchy, 0.0, scale);
}

std::string InnovationSpec::name() const {
  switch (kind_) {
    case InnovationKind::Gaussian: return "gaussian";
    case InnovationKind::StudentT: return "student_t";
    case InnovationKind::Cauchy: return "cauchy";
  }
  return "unknown";
}

double InnovationSpec::density(double x) const {
  const double z = x / scale_;
  double standard = 0.0;
  switch (kind_) {
    case InnovationKind::Gaussian:
      standard = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      break;
    case InnovationKind::StudentT: {
      const double log_norm = std::lgamma(0.5 * (nu_ + 1.0)) - std::lgamma(0.5 * nu_) -
                              0.5 * std::log(nu_ * std::numbers::pi);
      standard = std::exp(log_norm - 0.5 * (nu_ + 1.0) * std::log1p(z * z / nu_));
      break;
    }
    case InnovationKind::Cauchy:
      standard = 1.0 / (std::numbers::pi * (1.0 + z * z));
      break;
  }
  return standard / scale_;
}

double InnovationSpec::survival(double x) const {
  if (x <= 0.0) return 1.0;
  const double z = x / scale_;
  switch (kind_) {
    case InnovationKind::Gaussian:
      return std::erfc(z / std::numbers::sqrt2);
    case InnovationKind::StudentT:
      return boost::math::ibeta(0.5 * nu_, 0.5, nu_ / (nu_ + z * z));
    case InnovationKind::Cauchy:
      // atan(1/z) keeps full relative precision far in the tail.
      return z > 1.0 ? 2.0 / std::numbers::pi * std::atan(1.0 / z)
                     : 1.0 - 2.0 / std::numbers::pi * std::atan(z);
  }
  return 0.0;
}

double InnovationSpec::tail_index() const {
  switch (kind_) {
    case InnovationKind::Gaussian: return 2.0;
    case InnovationKind::StudentT: return nu_;
    case InnovationKind::Cauchy: return 1.0;
  }
  return 0.0;
}

double InnovationSpec::draw(Rng& rng) const {
  switch (kind_) {
    case InnovationKind::Gaussian: return scale_ * rng.normal();
    case InnovationKind::StudentT: return scale_ * rng.student_t(nu_);
    case InnovationKind::Cauchy: return scale_ * rng.cauchy();
  }
  return 0.0;
}

std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("sample_innovations requires n >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& e : out) e = spec.draw(rng);
  return out;
}

double tail_quantile_a(const InnovationSpec& spec, std::size_t n) {
  if (n < 2) throw ConfigError("tail_quantile_a requires n >= 2");
  const double target = 1.0 / static_cast<double>(n);
  double lo = 0.0;
  double hi = spec.scale();
  while (spec.survival(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("tail quantile bracket overflowed");
  }
  // S is continuous and strictly decreasing, so bisection converges to the root.
  for (int iter = 0; iter < 400 && hi - lo > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (spec.survival(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double truncated_mean_b(const InnovationSpec& spec, std::size_t n) {
  const double a = tail_quantile_a(spec, n);
  using boost::math::quadrature::gauss_kronrod;
  const auto integrand = [&spec](double x) { return x * spec.density(x); };
  // Split on a geometric grid so each panel sees a well-scaled integrand.
  double total = 0.0;
  double left = 0.0;
  double right = std::min(a, spec.scale());
  while (left < a) {
    double err = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, left, right, 20, 1e-14, &err);
    left = right;
    right = std::min(a, right * 10.0);
  }
  return 2.0 * total;
}

}  // namespace tvlad
