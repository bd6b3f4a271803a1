#include "tvlad/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tvlad/errors.hpp"
#include "tvlad/parallel.hpp"
#include "tvlad/rng.hpp"

namespace tvlad {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::size_t anchor_index(double u0, std::size_t T) {
  return static_cast<std::size_t>(std::floor(u0 * static_cast<double>(T) + 1e-9));
}

LocalFitResult fit_from_design(const LocalDesign& design, double u0, bool least_squares) {
  LocalFitResult out;
  out.u0 = u0;
  out.bandwidth = design.bandwidth;
  out.effective_n = design.times.size();
  out.V1 = sample_matrix(design, 1);
  out.V2 = sample_matrix(design, 2);
  if (least_squares) {
    const WlsSolution wls = solve_wls(design.problem);
    out.beta_hat = wls.beta;
    out.status = wls.singular ? SolverStatus::Degenerate : SolverStatus::Optimal;
    const VectorXd r = design.problem.response - design.problem.design * wls.beta;
    out.objective = design.problem.weights.dot(r.cwiseAbs2());
  } else {
    const WladSolution sol = solve_wlad(design.problem);
    out.beta_hat = sol.beta;
    out.status = sol.status;
    out.objective = sol.objective;
  }
  return out;
}

}  // namespace

double default_bandwidth(std::size_t T) {
  if (T < 20) throw ConfigError("bandwidth rule needs T >= 20");
  const double t = static_cast<double>(T);
  const double h = std::log(t) / std::pow(t, 0.6);
  if (!(h < 0.5)) throw ConfigError("bandwidth rule gives h >= 0.5; sample too small");
  return h;
}

double resolve_bandwidth(const EstimationConfig& config, std::size_t T) {
  if (!config.bandwidth) return default_bandwidth(T);
  const double h = *config.bandwidth;
  if (!(h > 0.0 && h < 0.5)) throw ConfigError("bandwidth must lie in (0, 0.5)");
  return h;
}

LocalDesign build_local_design(std::span<const double> series, double u0, const EstimationConfig& config) {
  const std::size_t T = series.size();
  const std::size_t p = config.order;
  if (p == 0) throw ConfigError("autoregressive order must be at least 1");
  if (T <= p) throw DataError("series is too short for the requested order");
  if (!config.weight.resolved()) throw ConfigError("weight cutoff is unresolved; resolve it against the data first");
  if (!(u0 > 0.0 && u0 < 1.0)) throw BoundaryError("u0 must lie in (0, 1)");
  for (double v : series) {
    if (!std::isfinite(v)) throw DataError("series contains non-finite values");
  }

  const double h = resolve_bandwidth(config, T);
  const double th = static_cast<double>(T) * h;
  if (th < 4.0 * static_cast<double>(p)) throw ConfigError("Th < 4p: too few effective observations");
  const double reach = config.kernel.support * h;
  if (config.boundary == BoundaryPolicy::Error && (u0 < reach || u0 > 1.0 - reach)) {
    std::ostringstream msg;
    msg << "u0 = " << u0 << " lies outside the admissible range [" << reach << ", " << 1.0 - reach
        << "]; restrict u0 or enable truncation";
    throw BoundaryError(msg.str());
  }

  const std::size_t t0 = anchor_index(u0, T);
  LocalDesign out;
  out.bandwidth = h;
  out.T = T;
  std::vector<double> kw, sw;
  for (std::size_t t = p + 1; t <= T; ++t) {
    const double k = kernel_value(config.kernel, (static_cast<double>(t) - static_cast<double>(t0)) / th);
    if (!(k > 0.0)) continue;
    out.times.push_back(t);
    kw.push_back(k);
  }
  if (out.times.size() < p) throw BoundaryError("kernel window holds fewer than p observations");

  const auto n = static_cast<Index>(out.times.size());
  out.problem.design.resize(n, static_cast<Index>(p));
  out.problem.response.resize(n);
  out.problem.weights.resize(n);
  out.kernel_weights = Eigen::Map<const VectorXd>(kw.data(), n);
  out.self_weights.resize(n);
  std::vector<double> lags(p);
  for (Index i = 0; i < n; ++i) {
    const std::size_t t = out.times[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < p; ++j) lags[j] = series[t - 2 - j];
    std::optional<std::span<const double>> past;
    if (config.weight.needs_full_past()) past = series.subspan(0, t - 1);
    const double w = weight_value(config.weight, lags, past);
    out.self_weights[i] = w;
    for (std::size_t j = 0; j < p; ++j) out.problem.design(i, static_cast<Index>(j)) = lags[j];
    out.problem.response[i] = series[t - 1];
    out.problem.weights[i] = out.kernel_weights[i] * w;
  }
  return out;
}

MatrixXd sample_matrix(const LocalDesign& design, int power) {
  const MatrixXd& x = design.problem.design;
  VectorXd c(x.rows());
  for (Index i = 0; i < x.rows(); ++i) c[i] = design.kernel_weights[i] * std::pow(design.self_weights[i], power);
  MatrixXd v = x.transpose() * c.asDiagonal() * x;
  v /= static_cast<double>(design.T) * design.bandwidth;
  return 0.5 * (v + v.transpose());
}

LocalFitResult lswlade_at(std::span<const double> series, double u0, const EstimationConfig& config) {
  EstimationConfig resolved = config;
  resolved.weight = resolve_weight(config.weight, series);
  return fit_from_design(build_local_design(series, u0, resolved), u0, false);
}

std::vector<GridFit> lswlade_grid(std::span<const double> series, std::span<const double> grid,
                                  const EstimationConfig& config) {
  EstimationConfig resolved = config;
  resolved.weight = resolve_weight(config.weight, series);
  std::vector<GridFit> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      out[i].fit = fit_from_design(build_local_design(series, grid[i], resolved), grid[i], false);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

LocalFitResult baseline_estimate(std::span<const double> series, double u0, const EstimationConfig& config,
                                 Baseline which) {
  EstimationConfig unit = config;
  unit.weight = WeightSpec::unit();
  return fit_from_design(build_local_design(series, u0, unit), u0, which == Baseline::L2);
}

BiasEstimate bias_term_montecarlo(const TvModel& model, double u0, const EstimationConfig& config,
                                  std::size_t reps, std::size_t horizon, std::uint64_t seed) {
  if (!model.has_first_derivatives() || !model.has_second_derivatives()) {
    throw ConfigError("bias term needs first and second coefficient derivatives");
  }
  if (!config.weight.differentiable()) throw ConfigError("bias term needs a differentiable weight function");
  if (reps < 2) throw ConfigError("bias Monte Carlo needs at least two replications");
  const std::size_t p = model.order();
  if (horizon <= p) throw ConfigError("bias Monte Carlo horizon must exceed the order");

  const VectorXd b1 = model.beta_d1_at(u0);
  const VectorXd b2 = model.beta_d2_at(u0);
  const double f0 = model.innovation().density_at_zero();
  const auto pp = static_cast<Index>(p);
  const bool trivial = b1.isZero(0.0) && b2.isZero(0.0);

  MatrixXd rep_means = MatrixXd::Zero(static_cast<Index>(reps), pp);
  if (!trivial) {
    parallel_for(reps, [&](std::size_t r) {
      const DerivativePaths paths =
          joint_derivative_paths(model, u0, horizon, kDefaultBurnIn, derive_seed(seed, r), 2);
      const WeightSpec weight = resolve_weight(config.weight, paths.level);
      VectorXd x(pp), dx(pp), acc = VectorXd::Zero(pp);
      for (std::size_t t = p; t < horizon; ++t) {
        for (std::size_t j = 0; j < p; ++j) {
          x[static_cast<Index>(j)] = paths.level[t - 1 - j];
          dx[static_cast<Index>(j)] = paths.d1[t - 1 - j];
        }
        const std::span<const double> xs(x.data(), p);
        const double w = weight_value(weight, xs);
        const VectorXd grad = weight_gradient(weight, xs);
        const double term = -w * b2.dot(x) + 2.0 * grad.dot(dx) * b1.dot(x) + 4.0 * w * b1.dot(dx);
        acc += term * x;
      }
      rep_means.row(static_cast<Index>(r)) = (f0 * acc / static_cast<double>(horizon - p)).transpose();
    });
  }

  BiasEstimate out;
  out.draws = reps * (horizon - p);
  out.mean = rep_means.colwise().mean().transpose();
  const MatrixXd centered = rep_means.rowwise() - out.mean.transpose();
  const double r = static_cast<double>(reps);
  out.standard_error = (centered.colwise().squaredNorm().transpose() / (r - 1.0) / r).cwiseSqrt();
  return out;
}

CorrectedEstimate bias_corrected_estimate(const LocalFitResult& fit, const VectorXd& bias, double f0, double h,
                                          const KernelSpec& kernel) {
  if (!(f0 > 0.0)) throw ConfigError("f(0) must be positive");
  if (bias.size() != fit.beta_hat.size()) throw ConfigError("bias vector has the wrong dimension");
  CorrectedEstimate out{fit.beta_hat, false};
  Eigen::FullPivLU<MatrixXd> lu(fit.V1);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return out;
  const double kappa = kernel_moment(kernel, 1, 2);
  out.beta = fit.beta_hat + h * h * lu.solve(bias) * kappa / (2.0 * f0);
  out.applied = true;
  return out;
}

}  // namespace tvlad
