#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvlad/estimator.hpp"
#include "tvlad/innovations.hpp"
#include "tvlad/rng.hpp"

namespace tvlad {

enum class MultiplierKind { Exponential, Gaussian, TwoPoint };

/// Law of the bootstrap multipliers z_t. Exponential(1) and N(1, 1) have unit
/// mean and variance; TwoPoint puts mass 1/2 on each atom and must have mean 1.
struct MultiplierSpec {
  MultiplierKind kind = MultiplierKind::Exponential;
  double low = 0.0;
  double high = 2.0;

  static MultiplierSpec exponential();
  /// Negative draws are clamped to zero and counted.
  static MultiplierSpec gaussian();
  static MultiplierSpec two_point(double low = 0.0, double high = 2.0);

  double draw(Rng& rng) const;
  std::string name() const;
};

struct BootstrapEnsemble {
  std::vector<double> points;            ///< one or two u-values
  std::vector<LocalFitResult> base_fits; ///< one per point
  /// Usable replicates, one per row; columns are the p coefficients of each point in turn.
  Eigen::MatrixXd replicates;
  std::vector<std::size_t> replicate_ids;  ///< index k of each usable row
  std::vector<std::size_t> failed;         ///< replicates dropped for a rank-deficient or failed solve
  std::size_t clamped = 0;                 ///< Gaussian multipliers clamped at zero
  MultiplierSpec multiplier;
  std::size_t M = 0;
  std::size_t order = 0;
  std::size_t T = 0;
  std::uint64_t seed = 0;

  /// Replicate block of point i (rows x p).
  Eigen::MatrixXd block(std::size_t i) const;
};

/// M multiplier-bootstrap refits. Replicate k draws z_t, t = p+1..T, from
/// derive_seed(seed, k) and solves every point with weights z_t K w_{t-1}
/// on that single z-vector. Throws NumericError when more than 5% fail.
BootstrapEnsemble bootstrap_replicates(std::span<const double> series, std::span<const double> points,
                                       const EstimationConfig& config, std::size_t M,
                                       const MultiplierSpec& multiplier, std::uint64_t seed);

/// Sample covariance (denominator n - 1) of the replicates of one point.
Eigen::MatrixXd bootstrap_covariance(const BootstrapEnsemble& ensemble, std::size_t point = 0);

struct WaldResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  bool pseudo_inverse = false;  ///< R V R' was singular
};

/// (R b - c)' (R V R')^-1 (R b - c) against chi-square with rows(R) degrees of freedom.
WaldResult wald_test(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& cov, const Eigen::MatrixXd& R,
                     const Eigen::VectorXd& c);

inline constexpr double kTestLevels[] = {0.10, 0.05, 0.01};

struct LevelDecision {
  double level;
  double critical_value;
  bool reject;
};

struct EquivalenceReport {
  double u1 = 0.0;
  double u2 = 0.0;
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  Eigen::VectorXd difference;  ///< beta_hat(u1) - beta_hat(u2)
  Eigen::MatrixXd xi;          ///< bootstrap covariance of sqrt(Th) times the difference
  double th = 0.0;
  std::vector<LevelDecision> decisions;
};

/// Statistic Th d' Xi^-1 d with Xi = (Th / M) sum_k (d_k - d)(d_k - d)' from a
/// paired ensemble. Throws NumericError when the smallest eigenvalue of Xi is below 1e-12.
EquivalenceReport equivalence_from_ensemble(const BootstrapEnsemble& ensemble,
                                            std::span<const double> levels = kTestLevels);

EquivalenceReport equivalence_test(std::span<const double> series, double u1, double u2,
                                   const EstimationConfig& config, std::size_t M,
                                   const MultiplierSpec& multiplier, std::uint64_t seed,
                                   std::span<const double> levels = kTestLevels);

struct ConfidenceRegion {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape;  ///< bootstrap covariance V
  double radius2 = 0.0;   ///< upper-delta chi-square quantile with p degrees of freedom
  bool pseudo_inverse = false;

  /// (b - center)' V^-1 (b - center)
  double criterion(const Eigen::VectorXd& b) const;
  bool contains(const Eigen::VectorXd& b) const { return criterion(b) <= radius2; }

 private:
  friend ConfidenceRegion confidence_region(const Eigen::VectorXd&, const Eigen::MatrixXd&, double);
  Eigen::MatrixXd precision_;
};

ConfidenceRegion confidence_region(const Eigen::VectorXd& beta_hat, const Eigen::MatrixXd& cov, double delta);

/// Upper-(delta / k) chi-square quantile with df degrees of freedom.
double bonferroni_critical(double delta, std::size_t k, double df);

/// h a_{floor(Th)}; values above 1 suggest the bootstrap side condition is far from met.
double bandwidth_side_condition(const InnovationSpec& innovation, std::size_t T, double h);

}  // namespace tvlad
