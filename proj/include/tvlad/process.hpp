#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvlad/innovations.hpp"

namespace tvlad {

/// A coefficient curve u -> beta_j(u) on [0, 1] with optional first and second
/// derivatives. The parametric families carry their parameters so a model can
/// be written back to configuration.
struct CoefFunction {
  enum class Family { Constant, Linear, Sine, Custom };

  Family family = Family::Custom;
  /// Constant: {c}; Linear: {slope, intercept}; Sine: {amplitude, frequency, phase}.
  std::vector<double> params;
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;

  static CoefFunction constant(double c);
  static CoefFunction linear(double slope, double intercept);
  /// amplitude * sin(2 pi (frequency * u + phase)).
  static CoefFunction sine(double amplitude, double frequency, double phase = 0.0);
  static CoefFunction custom(std::function<double(double)> value,
                             std::function<double(double)> d1 = {},
                             std::function<double(double)> d2 = {});
};

/// tvAR(p) model Y_t = sum_j beta_j(t/T) Y_{t-j} + e_t. Construction rejects
/// coefficient curves that are unstable anywhere on a 1001-point grid of [0, 1]
/// and derivative curves that disagree with finite differences.
class TvModel {
 public:
  TvModel(std::vector<CoefFunction> coefficients, InnovationSpec innovation);

  std::size_t order() const noexcept { return coefficients_.size(); }
  const InnovationSpec& innovation() const noexcept { return innovation_; }
  const std::vector<CoefFunction>& coefficients() const noexcept { return coefficients_; }
  TvModel with_innovation(const InnovationSpec& innovation) const;

  /// beta_j(u) with the freeze convention beta_j(u) = beta_j(0) for u < 0.
  double beta(std::size_t j, double u) const;
  Eigen::VectorXd beta_at(double u) const;
  Eigen::VectorXd beta_d1_at(double u) const;
  Eigen::VectorXd beta_d2_at(double u) const;
  bool has_first_derivatives() const noexcept;
  bool has_second_derivatives() const noexcept;

 private:
  std::vector<CoefFunction> coefficients_;
  InnovationSpec innovation_;
};

/// True when every root of 1 - sum_j beta_j z^j satisfies |z| > 1 + margin.
bool ar_polynomial_stable(const Eigen::VectorXd& beta, double margin = 1e-6);

/// The two reference models of the simulation studies.
TvModel sine_tvar1(const InnovationSpec& innovation, double amplitude = 0.8, double frequency = 1.0);
TvModel sine_tvar2(const InnovationSpec& innovation);

struct TvSeries {
  std::vector<double> values;       ///< Y_{1,T}, ..., Y_{T,T}
  /// e_t recovered as Y_t - sum_j beta_j(t/T) Y_{t-j}; equal to the drawn shock up to rounding.
  std::vector<double> innovations;
  std::vector<double> presample;              ///< Y_{1-p}, ..., Y_0
  std::vector<double> presample_innovations;  ///< burn-in shocks, oldest first, last one is e_0
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;

  std::size_t length() const noexcept { return values.size(); }
};

inline constexpr std::size_t kDefaultBurnIn = 500;

TvSeries simulate_tvar(const TvModel& model, std::size_t T, std::size_t burn_in, std::uint64_t seed);

/// Y_t(u0): the AR(p) recursion frozen at beta(u0), driven by the same shock
/// stream as simulate_tvar with the same seed and burn-in.
std::vector<double> simulate_stationary(const TvModel& model, double u0, std::size_t T,
                                        std::size_t burn_in, std::uint64_t seed);

struct DerivativePaths {
  std::vector<double> level;  ///< Y_t(u0)
  std::vector<double> d1;     ///< dY_t(u0)/du
  std::vector<double> d2;     ///< d2Y_t(u0)/du2 (empty when not requested)
};

DerivativePaths joint_derivative_paths(const TvModel& model, double u0, std::size_t T,
                                       std::size_t burn_in, std::uint64_t seed, int max_order);

std::vector<double> derivative_process(const TvModel& model, double u0, int order, std::size_t T,
                                       std::uint64_t seed, std::size_t burn_in = kDefaultBurnIn);

/// psi_{l,t,T} = prod_{k<l} beta_1((t-k)/T), l = 0..L (tvAR(1) only).
std::vector<double> tvma_coefficients(const TvModel& model, std::size_t t, std::size_t T, std::size_t L);

/// Smallest L with rho^L < 1e-12 where rho = sup_u |beta_1(u)|.
std::size_t default_ma_truncation(double rho);
double sup_abs_beta1(const TvModel& model);
/// Lipschitz constant of beta_1 estimated on a 10^4-point grid.
double lipschitz_beta1(const TvModel& model);

struct GapEntry {
  std::size_t t;
  double lhs;
  double rhs;
  double ratio;
  bool holds;
};

struct GapReport {
  std::vector<GapEntry> entries;
  double rho = 0.0;
  double lipschitz = 0.0;
  double c0 = 0.0;
  std::size_t truncation = 0;
  bool all_hold() const;
};

/// Compares |Y_{t,T} - Y_t(u0)| with C0 (|t/T - u0| + 1/T) sum_j l_j^{-1} |e_{t-j}|
/// for every t with |t/T - u0| < 1/T, using truncated MA expansions on one shock stream.
GapReport approximation_gap_check(const TvModel& model, double u0, std::size_t T, std::size_t L,
                                  std::uint64_t seed);

}  // namespace tvlad
