#include "tvlad/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "tvlad/errors.hpp"
#include "tvlad/parallel.hpp"
#include "tvlad/stats.hpp"

namespace tvlad {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd pseudo_inverse(const MatrixXd& a) {
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
  cod.setThreshold(1e-12);
  return cod.pseudoInverse();
}

/// Inverse of a symmetric matrix, or its pseudo-inverse when not positive definite.
MatrixXd symmetric_inverse(const MatrixXd& a, bool& pseudo) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  pseudo = !(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1e-300));
  if (pseudo) return pseudo_inverse(a);
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

MultiplierSpec MultiplierSpec::exponential() { return {MultiplierKind::Exponential, 0.0, 2.0}; }

MultiplierSpec MultiplierSpec::gaussian() { return {MultiplierKind::Gaussian, 0.0, 2.0}; }

MultiplierSpec MultiplierSpec::two_point(double low, double high) {
  if (!(low >= 0.0 && high >= low) || std::abs(0.5 * (low + high) - 1.0) > 1e-12) {
    throw ConfigError("two-point multipliers need nonnegative atoms with mean 1");
  }
  return {MultiplierKind::TwoPoint, low, high};
}

double MultiplierSpec::draw(Rng& rng) const {
  switch (kind) {
    case MultiplierKind::Exponential: return rng.exponential();
    case MultiplierKind::Gaussian: return 1.0 + rng.normal();
    case MultiplierKind::TwoPoint: return rng.uniform() < 0.5 ? low : high;
  }
  return 1.0;
}

std::string MultiplierSpec::name() const {
  switch (kind) {
    case MultiplierKind::Exponential: return "exponential";
    case MultiplierKind::Gaussian: return "gaussian";
    case MultiplierKind::TwoPoint: return "two_point";
  }
  return "unknown";
}

MatrixXd BootstrapEnsemble::block(std::size_t i) const {
  if (i >= points.size()) throw ConfigError("ensemble has no such point");
  return replicates.middleCols(static_cast<Index>(i * order), static_cast<Index>(order));
}

BootstrapEnsemble bootstrap_replicates(std::span<const double> series, std::span<const double> points,
                                       const EstimationConfig& config, std::size_t M,
                                       const MultiplierSpec& multiplier, std::uint64_t seed) {
  if (M < 2) throw ConfigError("bootstrap needs M >= 2");
  if (points.empty() || points.size() > 2) throw ConfigError("bootstrap takes one or two points");
  const std::size_t p = config.order;
  const std::size_t T = series.size();

  EstimationConfig resolved = config;
  resolved.weight = resolve_weight(config.weight, series);
  std::vector<LocalDesign> designs;
  BootstrapEnsemble out;
  for (double u : points) {
    designs.push_back(build_local_design(series, u, resolved));
    const WladSolution base = solve_wlad(designs.back().problem);
    LocalFitResult fit;
    fit.u0 = u;
    fit.beta_hat = base.beta;
    fit.effective_n = designs.back().times.size();
    fit.V1 = sample_matrix(designs.back(), 1);
    fit.V2 = sample_matrix(designs.back(), 2);
    fit.objective = base.objective;
    fit.status = base.status;
    fit.bandwidth = designs.back().bandwidth;
    out.base_fits.push_back(std::move(fit));
  }
  out.points.assign(points.begin(), points.end());
  out.multiplier = multiplier;
  out.M = M;
  out.order = p;
  out.seed = seed;
  out.T = T;

  const auto width = static_cast<Index>(p * points.size());
  MatrixXd all(static_cast<Index>(M), width);
  std::vector<char> ok(M, 0);
  std::vector<std::size_t> clamped(M, 0);
  parallel_for(M, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    // z_t for t = p+1..T, shared by every point.
    std::vector<double> z(T - p);
    for (double& v : z) {
      v = multiplier.draw(rng);
      if (v < 0.0) {
        v = 0.0;
        ++clamped[k];
      }
    }
    try {
      for (std::size_t i = 0; i < designs.size(); ++i) {
        WladProblem problem = designs[i].problem;
        for (Index r = 0; r < problem.weights.size(); ++r) {
          problem.weights[r] *= z[designs[i].times[static_cast<std::size_t>(r)] - p - 1];
        }
        const WladSolution sol = solve_wlad(problem);
        if (sol.rank < p) return;
        all.block(static_cast<Index>(k), static_cast<Index>(i * p), 1, static_cast<Index>(p)) = sol.beta.transpose();
      }
      ok[k] = 1;
    } catch (const NumericError&) {
    }
  });

  for (std::size_t k = 0; k < M; ++k) {
    out.clamped += clamped[k];
    if (ok[k]) {
      out.replicate_ids.push_back(k);
    } else {
      out.failed.push_back(k);
    }
  }
  if (static_cast<double>(out.failed.size()) > 0.05 * static_cast<double>(M)) {
    throw NumericError("more than 5% of bootstrap replicates failed");
  }
  if (out.replicate_ids.size() < 2) throw NumericError("fewer than two usable bootstrap replicates");
  out.replicates.resize(static_cast<Index>(out.replicate_ids.size()), width);
  for (std::size_t i = 0; i < out.replicate_ids.size(); ++i) {
    out.replicates.row(static_cast<Index>(i)) = all.row(static_cast<Index>(out.replicate_ids[i]));
  }
  return out;
}

MatrixXd bootstrap_covariance(const BootstrapEnsemble& ensemble, std::size_t point) {
  const MatrixXd reps = ensemble.block(point);
  if (reps.rows() < 2) throw NumericError("bootstrap covariance needs two usable replicates");
  const MatrixXd centered = reps.rowwise() - reps.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(reps.rows() - 1);
}

WaldResult wald_test(const VectorXd& beta_hat, const MatrixXd& cov, const MatrixXd& R, const VectorXd& c) {
  if (R.cols() != beta_hat.size() || R.rows() != c.size() || cov.rows() != beta_hat.size() ||
      cov.cols() != beta_hat.size()) {
    throw ConfigError("Wald test dimensions do not match");
  }
  if (R.rows() == 0) throw ConfigError("Wald test needs at least one restriction");
  WaldResult out;
  const VectorXd diff = R * beta_hat - c;
  const MatrixXd middle = R * cov * R.transpose();
  const MatrixXd inv = symmetric_inverse(0.5 * (middle + middle.transpose()), out.pseudo_inverse);
  out.statistic = std::max(0.0, diff.dot(inv * diff));
  out.df = static_cast<std::size_t>(R.rows());
  out.p_value = stats::chi2_sf(out.statistic, static_cast<double>(out.df));
  return out;
}

EquivalenceReport equivalence_from_ensemble(const BootstrapEnsemble& ensemble, std::span<const double> levels) {
  if (ensemble.points.size() != 2) throw ConfigError("equivalence test needs a paired two-point ensemble");
  const std::size_t p = ensemble.order;
  const auto pp = static_cast<Index>(p);
  EquivalenceReport out;
  out.u1 = ensemble.points[0];
  out.u2 = ensemble.points[1];
  out.df = p;
  out.difference = ensemble.base_fits[0].beta_hat - ensemble.base_fits[1].beta_hat;
  out.th = static_cast<double>(ensemble.T) * ensemble.base_fits[0].bandwidth;

  const MatrixXd diffs = ensemble.replicates.leftCols(pp) - ensemble.replicates.middleCols(pp, pp);
  const MatrixXd centered = diffs.rowwise() - out.difference.transpose();
  out.xi = out.th * (centered.transpose() * centered) / static_cast<double>(diffs.rows());

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.xi);
  if (!(eig.eigenvalues().minCoeff() >= 1e-12)) {
    throw NumericError("bootstrap variance of the difference is below 1e-12; degenerate ensemble");
  }
  const VectorXd proj = eig.eigenvectors().transpose() * out.difference;
  out.statistic = out.th * proj.cwiseAbs2().cwiseQuotient(eig.eigenvalues()).sum();
  out.p_value = stats::chi2_sf(out.statistic, static_cast<double>(p));
  for (double level : levels) {
    const double crit = stats::chi2_upper_quantile(level, static_cast<double>(p));
    out.decisions.push_back({level, crit, out.statistic > crit});
  }
  return out;
}

EquivalenceReport equivalence_test(std::span<const double> series, double u1, double u2,
                                   const EstimationConfig& config, std::size_t M,
                                   const MultiplierSpec& multiplier, std::uint64_t seed,
                                   std::span<const double> levels) {
  if (u1 == u2) throw ConfigError("equivalence test needs two distinct points");
  const double pts[] = {u1, u2};
  return equivalence_from_ensemble(bootstrap_replicates(series, pts, config, M, multiplier, seed), levels);
}

double ConfidenceRegion::criterion(const VectorXd& b) const {
  const VectorXd d = b - center;
  return d.dot(precision_ * d);
}

ConfidenceRegion confidence_region(const VectorXd& beta_hat, const MatrixXd& cov, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("confidence level delta must lie in (0, 1)");
  if (cov.rows() != beta_hat.size() || cov.cols() != beta_hat.size()) {
    throw ConfigError("confidence region dimensions do not match");
  }
  ConfidenceRegion out;
  out.center = beta_hat;
  out.shape = cov;
  out.precision_ = symmetric_inverse(0.5 * (cov + cov.transpose()), out.pseudo_inverse);
  out.radius2 = stats::chi2_upper_quantile(delta, static_cast<double>(beta_hat.size()));
  return out;
}

double bonferroni_critical(double delta, std::size_t k, double df) {
  if (k == 0) throw ConfigError("Bonferroni correction needs k >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("level must lie in (0, 1)");
  return stats::chi2_upper_quantile(delta / static_cast<double>(k), df);
}

double bandwidth_side_condition(const InnovationSpec& innovation, std::size_t T, double h) {
  const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(T) * h));
  if (n < 2) throw ConfigError("Th must be at least 2");
  return h * tail_quantile_a(innovation, n);
}

}  // namespace tvlad
