#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tvlad/process.hpp"
#include "tvlad/weights.hpp"
#include "tvlad/wlad.hpp"

namespace tvlad {

enum class BoundaryPolicy { Error, Truncate };

struct EstimationConfig {
  WeightSpec weight = WeightSpec::unit();
  KernelSpec kernel{};
  /// Fixed bandwidth; the rule log(T) / T^0.6 when absent.
  std::optional<double> bandwidth;
  std::size_t order = 1;
  /// Truncate fits points whose kernel window is cut by the sample edge.
  BoundaryPolicy boundary = BoundaryPolicy::Error;
};

struct LocalFitResult {
  double u0 = 0.0;
  Eigen::VectorXd beta_hat;
  std::size_t effective_n = 0;  ///< rows with positive kernel weight
  Eigen::MatrixXd V1;           ///< (Th)^-1 sum K w x x'
  Eigen::MatrixXd V2;           ///< (Th)^-1 sum K w^2 x x'
  double objective = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  double bandwidth = 0.0;
};

/// ln(T) / T^0.6. Throws ConfigError for T < 20 or a value >= 0.5.
double default_bandwidth(std::size_t T);
double resolve_bandwidth(const EstimationConfig& config, std::size_t T);

/// The weighted LAD problem behind a local fit: rows t = p+1..T inside the
/// kernel window around floor(u0 T), composite weights K((t - floor(u0 T)) / (Th)) w_{t-1}.
struct LocalDesign {
  WladProblem problem;
  Eigen::VectorXd kernel_weights;
  Eigen::VectorXd self_weights;
  std::vector<std::size_t> times;  ///< 1-based t of each row
  double bandwidth = 0.0;
  std::size_t T = 0;
};

/// config.weight must already be resolved (see resolve_weight).
LocalDesign build_local_design(std::span<const double> series, double u0, const EstimationConfig& config);

/// V^(j) matrices of a design.
Eigen::MatrixXd sample_matrix(const LocalDesign& design, int power);

LocalFitResult lswlade_at(std::span<const double> series, double u0, const EstimationConfig& config);

struct GridFit {
  std::optional<LocalFitResult> fit;
  std::string error;  ///< empty on success
};

/// Independent fits at each grid point; per-point failures are recorded, not thrown.
std::vector<GridFit> lswlade_grid(std::span<const double> series, std::span<const double> grid,
                                  const EstimationConfig& config);

enum class Baseline { L2, LAD };

LocalFitResult baseline_estimate(std::span<const double> series, double u0, const EstimationConfig& config,
                                 Baseline which);

struct BiasEstimate {
  Eigen::VectorXd mean;            ///< Monte Carlo estimate of E[b_t(u0)]
  Eigen::VectorXd standard_error;  ///< from the spread of per-replication means
  std::size_t draws = 0;
};

/// Simulates the stationary approximation and its u-derivatives at u0 on shared
/// shocks and averages
/// b_t = f(0) { -w beta''(u0)'X X + 2 (g'(X)' dX)(beta'(u0)'X) X + 4 w (beta'(u0)'dX) X }
/// over reps paths of the given horizon.
BiasEstimate bias_term_montecarlo(const TvModel& model, double u0, const EstimationConfig& config,
                                  std::size_t reps, std::size_t horizon, std::uint64_t seed);

struct CorrectedEstimate {
  Eigen::VectorXd beta;
  bool applied = false;  ///< false when V1 was singular and beta_hat is returned unchanged
};

/// beta_hat + h^2 V1^-1 E[b_t] int K x^2 / (2 f0).
CorrectedEstimate bias_corrected_estimate(const LocalFitResult& fit, const Eigen::VectorXd& bias,
                                          double f0, double h, const KernelSpec& kernel = {});

}  // namespace tvlad
