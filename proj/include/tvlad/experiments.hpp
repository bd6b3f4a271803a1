#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tvlad/bootstrap.hpp"
#include "tvlad/estimator.hpp"
#include "tvlad/process.hpp"

namespace tvlad {

struct EstimatorChoice {
  enum class Kind { Weighted, L2, LAD };
  std::string label;
  Kind kind = Kind::Weighted;
  WeightSpec weight = WeightSpec::unit();
};

/// L2, LAD, LSW1c1 (ling 0.5), LSW1c2 (ling 0.1), LSW2q1 (smooth indicator at
/// the 0.95 quantile), LSW2q2 (0.90 quantile), LSW3 (pan).
std::vector<EstimatorChoice> standard_estimator_menu();
EstimatorChoice find_estimator(const std::string& label);

/// {0.10, 0.15, ..., 0.90}.
std::vector<double> default_study_grid();

struct StudyConfig {
  TvModel model;
  std::vector<EstimatorChoice> menu = standard_estimator_menu();
  std::vector<std::size_t> T_list{1000};
  std::size_t replications = 200;
  std::vector<double> grid = default_study_grid();
  std::size_t M = 500;
  std::uint64_t seed = 0;
  std::optional<double> bandwidth;
  /// Estimator behind the equivalence tests and confidence regions.
  WeightSpec inference_weight = WeightSpec::smooth_indicator_quantile(0.90);
  MultiplierSpec multiplier = MultiplierSpec::exponential();
  std::size_t burn_in = kDefaultBurnIn;
};

struct StudyTable {
  std::string title;
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  Eigen::MatrixXd values;
  /// NaN where no standard error exists (a single replication).
  Eigen::MatrixXd standard_errors;
  std::vector<std::string> incomplete_columns;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::string to_csv() const;
  std::string to_text() const;
};

/// Seed of replication r at sample size T.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t T, std::size_t r);

/// Grid points inside [h, 1 - h] for sample size T.
std::vector<double> admissible_grid(const std::vector<double>& grid, std::size_t T, std::optional<double> bandwidth);

enum class ErrorMetric { MAE, MSE };

/// Rows are sample sizes, columns the estimator menu. Cell = average over
/// replications of (1/n) sum_i |beta_hat(u_i) - beta(u_i)|, with the l1 norm for
/// MAE and the l2 norm for MSE.
StudyTable run_mae_study(const StudyConfig& config, ErrorMetric metric);

/// Rejection frequencies of the equivalence test of u1 against each u2, per level.
StudyTable run_size_power_study(const StudyConfig& config, double u1, const std::vector<double>& u2_list,
                                const std::vector<double>& levels);

/// Fraction of replications whose true beta(u0) lies in the bootstrap region,
/// per nominal coverage. Metadata carries the count of nesting violations.
StudyTable run_coverage_study(const StudyConfig& config, double u0, const std::vector<double>& coverages);

}  // namespace tvlad
