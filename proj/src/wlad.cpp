#include "tvlad/wlad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tvlad/errors.hpp"

namespace tvlad {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct CoreResult {
  VectorXd beta;
  std::size_t iterations = 0;
  bool dual_degenerate = false;
};

std::size_t numeric_rank(const MatrixXd& x) {
  if (x.rows() == 0 || x.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  return static_cast<std::size_t>(qr.rank());
}

VectorXd irls_start(const MatrixXd& x, const VectorXd& y, const VectorXd& c) {
  VectorXd beta = solve_wls({x, y, c}).beta;
  std::vector<double> mags(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(y[i]);
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2), mags.end());
  const double scale = std::max(mags[mags.size() / 2], 1e-300);
  VectorXd w(c.size());
  for (double eps = 1e-2; eps >= 1e-8 * 0.999; eps *= 1e-2) {
    for (int it = 0; it < 3; ++it) {
      const VectorXd r = y - x * beta;
      for (Index i = 0; i < r.size(); ++i) w[i] = c[i] / std::max(std::abs(r[i]), eps * scale);
      beta = solve_wls({x, y, w}).beta;
    }
  }
  return beta;
}

/// Picks p linearly independent rows, preferring small |residual| under beta0.
std::vector<Index> initial_basis(const MatrixXd& x, const VectorXd& y, const VectorXd& beta0) {
  const Index n = x.rows();
  const Index p = x.cols();
  const VectorXd r = (y - x * beta0).cwiseAbs();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return r[a] < r[b]; });

  std::vector<Index> basis;
  MatrixXd q(p, p);
  for (Index t : order) {
    VectorXd v = x.row(t).transpose();
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < static_cast<Index>(basis.size()); ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    const double norm = v.norm();
    if (norm <= 1e-8 * norm0) continue;
    q.col(static_cast<Index>(basis.size())) = v / norm;
    basis.push_back(t);
    if (static_cast<Index>(basis.size()) == p) break;
  }
  if (static_cast<Index>(basis.size()) != p) throw NumericError("could not assemble an interpolating basis");
  return basis;
}

/// Simplex on a full-column-rank problem with strictly positive weights.
CoreResult simplex_core(const MatrixXd& x, const VectorXd& y, const VectorXd& c, const WladOptions& options) {
  const Index n = x.rows();
  const Index p = x.cols();

  const VectorXd beta0 = static_cast<std::size_t>(n) >= options.smoothing_threshold
                             ? irls_start(x, y, c)
                             : solve_wls({x, y, c}).beta;
  std::vector<Index> basis = initial_basis(x, y, beta0);
  std::vector<Index> position(static_cast<std::size_t>(n), -1);
  for (Index k = 0; k < p; ++k) position[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)])] = k;

  const double weight_total = c.sum();
  const VectorXd x_abs_rowsum = x.cwiseAbs().rowwise().sum();
  std::vector<signed char> sigma(static_cast<std::size_t>(n), 1);

  MatrixXd xb(p, p);
  VectorXd yb(p);
  VectorXd beta(p);
  VectorXd r(n);
  VectorXd tol(n);

  const auto refresh = [&]() {
    for (Index k = 0; k < p; ++k) {
      xb.row(k) = x.row(basis[static_cast<std::size_t>(k)]);
      yb[k] = y[basis[static_cast<std::size_t>(k)]];
    }
    beta = xb.partialPivLu().solve(yb);
    r = y - x * beta;
    const double beta_abs = beta.cwiseAbs().maxCoeff();
    for (Index t = 0; t < n; ++t) {
      tol[t] = 64.0 * kEps * (std::abs(y[t]) + x_abs_rowsum[t] * beta_abs);
      if (position[static_cast<std::size_t>(t)] >= 0) continue;
      if (r[t] > tol[t]) sigma[static_cast<std::size_t>(t)] = 1;
      else if (r[t] < -tol[t]) sigma[static_cast<std::size_t>(t)] = -1;
    }
  };

  struct Breakpoint {
    double step;
    Index row;
    double slope_jump;
  };
  std::vector<Breakpoint> breaks;
  breaks.reserve(static_cast<std::size_t>(n));

  const std::size_t bland_after = 2 * static_cast<std::size_t>(p) + 5;
  const std::size_t soft_cap = 20 * static_cast<std::size_t>(n + p) + 100;
  const std::size_t hard_cap = 1000 * static_cast<std::size_t>(n + p) + 1000;
  std::size_t degenerate_run = 0;
  bool bland = false;

  CoreResult out;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= hard_cap) throw NumericError("weighted LAD simplex did not converge");
    if (iter >= soft_cap) bland = true;

    refresh();
    VectorXd rhs = VectorXd::Zero(p);
    for (Index t = 0; t < n; ++t) {
      if (position[static_cast<std::size_t>(t)] >= 0) continue;
      rhs -= (c[t] * sigma[static_cast<std::size_t>(t)]) * x.row(t).transpose();
    }
    const VectorXd pi = xb.transpose().partialPivLu().solve(rhs);

    // Entering basis position: largest violation, or smallest row index in Bland mode.
    const double dual_tol = 1e-11 * weight_total;
    Index enter = -1;
    double worst = 0.0;
    for (Index k = 0; k < p; ++k) {
      const double excess = std::abs(pi[k]) - c[basis[static_cast<std::size_t>(k)]];
      if (excess <= dual_tol) continue;
      if (bland) {
        if (enter < 0 || basis[static_cast<std::size_t>(k)] < basis[static_cast<std::size_t>(enter)]) enter = k;
      } else if (excess > worst) {
        worst = excess;
        enter = k;
      }
    }
    if (enter < 0) {
      out.beta = beta;
      out.iterations = iter;
      for (Index k = 0; k < p; ++k) {
        if (std::abs(pi[k]) >= c[basis[static_cast<std::size_t>(k)]] * (1.0 - 1e-9) - dual_tol) {
          out.dual_degenerate = true;
        }
      }
      return out;
    }

    const Index k_row = basis[static_cast<std::size_t>(enter)];
    const double s = pi[enter] > 0.0 ? 1.0 : -1.0;
    VectorXd e = VectorXd::Zero(p);
    e[enter] = -s;
    const VectorXd d = xb.partialPivLu().solve(e);
    const VectorXd g = -(x * d);

    breaks.clear();
    for (Index t = 0; t < n; ++t) {
      if (position[static_cast<std::size_t>(t)] >= 0) continue;
      const double sg = sigma[static_cast<std::size_t>(t)] * g[t];
      if (!(sg < -1e-14 * (x_abs_rowsum[t] * d.cwiseAbs().maxCoeff() + 1e-300))) continue;
      const double rt = std::abs(r[t]) <= tol[t] ? 0.0 : r[t];
      breaks.push_back({std::max(0.0, -rt / g[t]), t, 2.0 * c[t] * std::abs(g[t])});
    }
    if (breaks.empty()) throw NumericError("weighted LAD simplex found an unbounded edge");
    std::sort(breaks.begin(), breaks.end(), [](const Breakpoint& a, const Breakpoint& b) {
      return a.step < b.step || (a.step == b.step && a.row < b.row);
    });

    std::size_t stop = 0;
    if (!bland) {
      double slope = c[k_row] - std::abs(pi[enter]);
      for (stop = 0; stop < breaks.size(); ++stop) {
        slope += breaks[stop].slope_jump;
        if (slope >= 0.0) break;
      }
      if (stop == breaks.size()) stop = breaks.size() - 1;
    }

    const Breakpoint& leave = breaks[stop];
    for (std::size_t i = 0; i < stop; ++i) {
      auto& sg = sigma[static_cast<std::size_t>(breaks[i].row)];
      sg = static_cast<signed char>(-sg);
    }
    const double scale = 1.0 + beta.cwiseAbs().maxCoeff();
    if (leave.step * d.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
      if (++degenerate_run > bland_after) bland = true;
    } else {
      degenerate_run = 0;
    }

    position[static_cast<std::size_t>(k_row)] = -1;
    sigma[static_cast<std::size_t>(k_row)] = static_cast<signed char>(s);
    position[static_cast<std::size_t>(leave.row)] = enter;
    basis[static_cast<std::size_t>(enter)] = leave.row;
  }
}

}  // namespace

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::Degenerate: return "degenerate";
    case SolverStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

WlsSolution solve_wls(const WladProblem& problem) {
  const MatrixXd& x = problem.design;
  const Index p = x.cols();
  const VectorXd& c = problem.weights;
  const MatrixXd gram = x.transpose() * c.asDiagonal() * x;
  const VectorXd rhs = x.transpose() * c.cwiseProduct(problem.response);

  WlsSolution out;
  Eigen::LDLT<MatrixXd> ldlt(gram);
  bool singular = ldlt.info() != Eigen::Success;
  if (!singular) {
    const VectorXd dvec = ldlt.vectorD().cwiseAbs();
    const double dmax = dvec.size() ? dvec.maxCoeff() : 0.0;
    singular = p == 0 || !(dmax > 0.0) || dvec.minCoeff() <= 1e-12 * dmax;
  }
  if (!singular) {
    out.beta = ldlt.solve(rhs);
    return out;
  }
  const VectorXd root = c.cwiseMax(0.0).cwiseSqrt();
  const MatrixXd xs = root.asDiagonal() * x;
  const VectorXd ys = root.cwiseProduct(problem.response);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(xs);
  cod.setThreshold(1e-10);
  out.beta = cod.solve(ys);
  out.singular = true;
  return out;
}

double wlad_objective(const WladProblem& problem, const VectorXd& beta) {
  return problem.weights.dot((problem.response - problem.design * beta).cwiseAbs());
}

WladSolution solve_wlad(const WladProblem& problem, const WladOptions& options) {
  const MatrixXd& x = problem.design;
  const Index n = x.rows();
  const Index p = x.cols();
  if (problem.response.size() != n || problem.weights.size() != n) {
    throw DataError("weighted LAD problem has mismatched dimensions");
  }
  if (p == 0) throw ConfigError("weighted LAD problem needs at least one regressor");
  for (Index t = 0; t < n; ++t) {
    if (!std::isfinite(problem.response[t]) || !std::isfinite(problem.weights[t]) || !x.row(t).allFinite()) {
      throw DataError("weighted LAD problem contains non-finite values");
    }
    if (problem.weights[t] < 0.0) throw DataError("weighted LAD weights must be non-negative");
  }

  std::vector<Index> active;
  for (Index t = 0; t < n; ++t) {
    if (problem.weights[t] > 0.0) active.push_back(t);
  }
  const auto m = static_cast<Index>(active.size());
  MatrixXd xa(m, p);
  VectorXd ya(m), ca(m);
  for (Index i = 0; i < m; ++i) {
    xa.row(i) = x.row(active[static_cast<std::size_t>(i)]);
    ya[i] = problem.response[active[static_cast<std::size_t>(i)]];
    ca[i] = problem.weights[active[static_cast<std::size_t>(i)]];
  }

  WladSolution out;
  out.rank = numeric_rank(xa);
  if (out.rank == 0) {
    out.beta = VectorXd::Zero(p);
    out.status = SolverStatus::Degenerate;
  } else if (out.rank < static_cast<std::size_t>(p)) {
    Eigen::JacobiSVD<MatrixXd> svd(xa, Eigen::ComputeThinV);
    const MatrixXd basis = svd.matrixV().leftCols(static_cast<Index>(out.rank));
    const CoreResult core = simplex_core(xa * basis, ya, ca, options);
    out.beta = basis * core.beta;
    out.iterations = core.iterations;
    out.status = SolverStatus::Degenerate;
  } else {
    const CoreResult core = simplex_core(xa, ya, ca, options);
    out.beta = core.beta;
    out.iterations = core.iterations;
    out.status = core.dual_degenerate ? SolverStatus::Degenerate : SolverStatus::Optimal;
  }
  out.objective = wlad_objective(problem, out.beta);
  return out;
}

SubgradientCheck subgradient_certificate(const WladProblem& problem, const VectorXd& beta, double tol) {
  const MatrixXd& x = problem.design;
  const VectorXd r = problem.response - x * beta;
  const double total = problem.weights.sum();
  const double scale = 1.0 + problem.response.cwiseAbs().maxCoeff();
  VectorXd free_part = VectorXd::Zero(x.cols());
  VectorXd slack = VectorXd::Zero(x.cols());
  for (Index t = 0; t < x.rows(); ++t) {
    const double c = problem.weights[t];
    if (c == 0.0) continue;
    if (std::abs(r[t]) <= 1e-9 * scale) {
      slack += c * x.row(t).transpose().cwiseAbs();
    } else {
      free_part += (r[t] > 0.0 ? c : -c) * x.row(t).transpose();
    }
  }
  SubgradientCheck out;
  out.worst_excess = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < x.cols(); ++j) {
    out.worst_excess = std::max(out.worst_excess, std::abs(free_part[j]) - slack[j] - tol * total);
  }
  out.holds = out.worst_excess <= 0.0;
  return out;
}

}  // namespace tvlad
