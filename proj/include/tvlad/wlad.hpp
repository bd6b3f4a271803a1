#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace tvlad {

/// min_beta sum_t c_t |y_t - x_t' beta| with design rows x_t and weights c_t >= 0.
struct WladProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;
  Eigen::VectorXd weights;
};

enum class SolverStatus { Optimal, Degenerate, Unbounded };

const char* to_string(SolverStatus status);

struct WladOptions {
  /// Problems with at least this many active rows get an IRLS smoothing pass
  /// (epsilon continuation 1e-2 -> 1e-8) before the exact basis exchange.
  std::size_t smoothing_threshold = 200;
};

struct WladSolution {
  Eigen::VectorXd beta;
  double objective = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  std::size_t iterations = 0;
  std::size_t rank = 0;  ///< rank of the positively weighted design rows
};

/// Exact weighted LAD fit by a simplex on the LAD linear program, moving between
/// interpolating bases with a weighted-median line search along each edge and
/// falling back to Bland's rule on degenerate pivots. Zero-weight rows are
/// dropped. A rank-deficient design yields the minimum-norm representative and
/// status Degenerate; so does a non-unique optimal face.
WladSolution solve_wlad(const WladProblem& problem, const WladOptions& options = {});

struct WlsSolution {
  Eigen::VectorXd beta;
  bool singular = false;  ///< Gram matrix singular; beta is the least-norm solution
};

/// Weighted least squares via the normal equations.
WlsSolution solve_wls(const WladProblem& problem);

double wlad_objective(const WladProblem& problem, const Eigen::VectorXd& beta);

struct SubgradientCheck {
  bool holds = false;
  double worst_excess = 0.0;  ///< max_j of |free part| - (zero-residual slack + tolerance)
};

/// Coordinate-wise subgradient optimality condition
/// |sum_{r_t != 0} c_t sign(r_t) x_tj| <= sum_{r_t = 0} c_t |x_tj| + tol * sum_t c_t.
SubgradientCheck subgradient_certificate(const WladProblem& problem, const Eigen::VectorXd& beta,
                                         double tol = 1e-7);

}  // namespace tvlad
