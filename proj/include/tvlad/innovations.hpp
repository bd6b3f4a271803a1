#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tvlad/rng.hpp"

namespace tvlad {

enum class InnovationKind { Gaussian, StudentT, Cauchy };

/// Innovation law with median zero: Gaussian, Student-t(nu) or Cauchy, times a
/// positive scale. Immutable once constructed.
class InnovationSpec {
 public:
  static InnovationSpec gaussian(double scale = 1.0);
  static InnovationSpec student_t(double nu, double scale = 1.0);
  static InnovationSpec cauchy(double scale = 1.0);

  InnovationKind kind() const noexcept { return kind_; }
  double nu() const noexcept { return nu_; }
  double scale() const noexcept { return scale_; }
  std::string name() const;

  double density(double x) const;
  /// P(|e| > x) for x >= 0.
  double survival(double x) const;
  double density_at_zero() const { return density(0.0); }
  /// Pareto exponent of the tails (2 by convention for the Gaussian).
  double tail_index() const;

  double draw(Rng& rng) const;

  bool operator==(const InnovationSpec&) const = default;

 private:
  InnovationSpec(InnovationKind kind, double nu, double scale);

  InnovationKind kind_ = InnovationKind::Gaussian;
  double nu_ = 0.0;
  double scale_ = 1.0;
};

/// n i.i.d. draws; a pure function of (spec, n, seed).
std::vector<double> sample_innovations(const InnovationSpec& spec, std::size_t n, std::uint64_t seed);

/// a_n = inf{x : P(|e| > x) <= 1/n}, the exact root of S(x) = 1/n.
double tail_quantile_a(const InnovationSpec& spec, std::size_t n);

/// b_n = E[|e| 1(|e| <= a_n)] by adaptive quadrature.
double truncated_mean_b(const InnovationSpec& spec, std::size_t n);

}  // namespace tvlad
