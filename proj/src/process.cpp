#include "tvlad/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tvlad/errors.hpp"

namespace tvlad {
namespace {

constexpr std::size_t kStabilityGrid = 1001;

double frozen(double u) { return u < 0.0 ? 0.0 : u; }

// s = sum_j beta_j * history[j], history[0] = most recent value.
double lagged_sum(const Eigen::VectorXd& beta, const std::vector<double>& history) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) s += beta[j] * history[static_cast<std::size_t>(j)];
  return s;
}

void push_front(std::vector<double>& history, double value) {
  std::rotate(history.rbegin(), history.rbegin() + 1, history.rend());
  history.front() = value;
}

void validate_length(const TvModel& model, std::size_t T) {
  if (T <= model.order()) throw ConfigError("series length T must exceed the model order");
}

}  // namespace

CoefFunction CoefFunction::constant(double c) {
  CoefFunction f;
  f.family = Family::Constant;
  f.params = {c};
  f.value = [c](double) { return c; };
  f.d1 = [](double) { return 0.0; };
  f.d2 = [](double) { return 0.0; };
  return f;
}

CoefFunction CoefFunction::linear(double slope, double intercept) {
  CoefFunction f;
  f.family = Family::Linear;
  f.params = {slope, intercept};
  f.value = [slope, intercept](double u) { return slope * u + intercept; };
  f.d1 = [slope](double) { return slope; };
  f.d2 = [](double) { return 0.0; };
  return f;
}

CoefFunction CoefFunction::sine(double amplitude, double frequency, double phase) {
  CoefFunction f;
  f.family = Family::Sine;
  f.params = {amplitude, frequency, phase};
  const double omega = 2.0 * std::numbers::pi * frequency;
  const double shift = 2.0 * std::numbers::pi * phase;
  f.value = [=](double u) { return amplitude * std::sin(omega * u + shift); };
  f.d1 = [=](double u) { return amplitude * omega * std::cos(omega * u + shift); };
  f.d2 = [=](double u) { return -amplitude * omega * omega * std::sin(omega * u + shift); };
  return f;
}

CoefFunction CoefFunction::custom(std::function<double(double)> value, std::function<double(double)> d1,
                                  std::function<double(double)> d2) {
  CoefFunction f;
  f.family = Family::Custom;
  f.value = std::move(value);
  f.d1 = std::move(d1);
  f.d2 = std::move(d2);
  return f;
}

bool ar_polynomial_stable(const Eigen::VectorXd& beta, double margin) {
  const Eigen::Index p = beta.size();
  if (p == 0) return true;
  // Roots z of 1 - sum beta_j z^j are reciprocals of the companion eigenvalues.
  const double limit = 1.0 / (1.0 + margin);
  if (p == 1) return std::abs(beta[0]) < limit;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  companion.row(0) = beta.transpose();
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i]) >= limit) return false;
  }
  return true;
}

TvModel::TvModel(std::vector<CoefFunction> coefficients, InnovationSpec innovation)
    : coefficients_(std::move(coefficients)), innovation_(innovation) {
  if (coefficients_.empty()) throw ConfigError("tvAR model needs order p >= 1");
  for (const auto& f : coefficients_) {
    if (!f.value) throw ConfigError("coefficient function is empty");
    if (static_cast<bool>(f.d2) && !static_cast<bool>(f.d1)) {
      throw ConfigError("second derivative supplied without first derivative");
    }
  }

  for (std::size_t i = 0; i < kStabilityGrid; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(kStabilityGrid - 1);
    const Eigen::VectorXd b = beta_at(u);
    if (!b.allFinite()) throw ConfigError("coefficient function is not finite on [0, 1]");
    if (!ar_polynomial_stable(b)) {
      std::ostringstream msg;
      msg << "tvAR model is not stable at u = " << u << " (a root of 1 - sum beta_j z^j lies within 1 + 1e-6)";
      throw ConfigError(msg.str());
    }
  }

  // Supplied derivatives must agree with central differences.
  constexpr double step = 1e-5;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    const auto& f = coefficients_[j];
    for (std::size_t i = 0; i < kStabilityGrid; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(kStabilityGrid - 1);
      if (f.d1) {
        const double fd = (f.value(u + step) - f.value(u - step)) / (2.0 * step);
        const double exact = f.d1(u);
        if (std::abs(fd - exact) > 1e-4 * std::max(1.0, std::abs(exact))) {
          throw ConfigError("first derivative of coefficient " + std::to_string(j + 1) +
                            " disagrees with finite differences");
        }
      }
      if (f.d2) {
        const double fd = (f.d1(u + step) - f.d1(u - step)) / (2.0 * step);
        const double exact = f.d2(u);
        if (std::abs(fd - exact) > 1e-4 * std::max(1.0, std::abs(exact))) {
          throw ConfigError("second derivative of coefficient " + std::to_string(j + 1) +
                            " disagrees with finite differences");
        }
      }
    }
  }
}

TvModel TvModel::with_innovation(const InnovationSpec& innovation) const {
  return TvModel(coefficients_, innovation);
}

double TvModel::beta(std::size_t j, double u) const { return coefficients_.at(j).value(frozen(u)); }

Eigen::VectorXd TvModel::beta_at(double u) const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(order()));
  for (std::size_t j = 0; j < order(); ++j) b[static_cast<Eigen::Index>(j)] = coefficients_[j].value(frozen(u));
  return b;
}

Eigen::VectorXd TvModel::beta_d1_at(double u) const {
  if (!has_first_derivatives()) throw ConfigError("model has no first-derivative functions");
  Eigen::VectorXd b(static_cast<Eigen::Index>(order()));
  for (std::size_t j = 0; j < order(); ++j) b[static_cast<Eigen::Index>(j)] = coefficients_[j].d1(u);
  return b;
}

Eigen::VectorXd TvModel::beta_d2_at(double u) const {
  if (!has_second_derivatives()) throw ConfigError("model has no second-derivative functions");
  Eigen::VectorXd b(static_cast<Eigen::Index>(order()));
  for (std::size_t j = 0; j < order(); ++j) b[static_cast<Eigen::Index>(j)] = coefficients_[j].d2(u);
  return b;
}

bool TvModel::has_first_derivatives() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](const auto& f) { return static_cast<bool>(f.d1); });
}

bool TvModel::has_second_derivatives() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](const auto& f) { return static_cast<bool>(f.d2); });
}

TvModel sine_tvar1(const InnovationSpec& innovation, double amplitude, double frequency) {
  return TvModel({CoefFunction::sine(amplitude, frequency)}, innovation);
}

TvModel sine_tvar2(const InnovationSpec& innovation) {
  return TvModel({CoefFunction::sine(0.8, 1.0), CoefFunction::sine(0.2, 1.0, 0.1)}, innovation);
}

TvSeries simulate_tvar(const TvModel& model, std::size_t T, std::size_t burn_in, std::uint64_t seed) {
  validate_length(model, T);
  const std::size_t p = model.order();
  Rng rng(seed);
  std::vector<double> history(p, 0.0);

  TvSeries out;
  out.seed = seed;
  out.burn_in = burn_in;
  out.presample_innovations.reserve(burn_in);
  const Eigen::VectorXd beta0 = model.beta_at(0.0);
  for (std::size_t s = 0; s < burn_in; ++s) {
    const double e = model.innovation().draw(rng);
    out.presample_innovations.push_back(e);
    push_front(history, lagged_sum(beta0, history) + e);
  }
  out.presample.assign(history.rbegin(), history.rend());

  out.values.resize(T);
  out.innovations.resize(T);
  for (std::size_t t = 1; t <= T; ++t) {
    const Eigen::VectorXd beta = model.beta_at(static_cast<double>(t) / static_cast<double>(T));
    const double e = model.innovation().draw(rng);
    const double s = lagged_sum(beta, history);
    const double y = s + e;
    out.values[t - 1] = y;
    out.innovations[t - 1] = y - s;
    push_front(history, y);
  }
  return out;
}

std::vector<double> simulate_stationary(const TvModel& model, double u0, std::size_t T, std::size_t burn_in,
                                        std::uint64_t seed) {
  validate_length(model, T);
  Rng rng(seed);
  const Eigen::VectorXd beta = model.beta_at(u0);
  std::vector<double> history(model.order(), 0.0);
  for (std::size_t s = 0; s < burn_in; ++s) {
    const double e = model.innovation().draw(rng);
    push_front(history, lagged_sum(beta, history) + e);
  }
  std::vector<double> out(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double e = model.innovation().draw(rng);
    const double y = lagged_sum(beta, history) + e;
    out[t] = y;
    push_front(history, y);
  }
  return out;
}

DerivativePaths joint_derivative_paths(const TvModel& model, double u0, std::size_t T, std::size_t burn_in,
                                       std::uint64_t seed, int max_order) {
  if (max_order < 1 || max_order > 2) throw ConfigError("derivative order must be 1 or 2");
  if (!model.has_first_derivatives() || (max_order == 2 && !model.has_second_derivatives())) {
    throw ConfigError("derivative process requires beta derivative functions");
  }
  validate_length(model, T);
  const std::size_t p = model.order();
  const Eigen::VectorXd beta = model.beta_at(u0);
  const Eigen::VectorXd beta1 = model.beta_d1_at(u0);
  const Eigen::VectorXd beta2 = max_order == 2 ? model.beta_d2_at(u0) : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));

  Rng rng(seed);
  std::vector<double> level(p, 0.0), first(p, 0.0), second(p, 0.0);
  DerivativePaths out;
  out.level.reserve(T);
  out.d1.reserve(T);
  if (max_order == 2) out.d2.reserve(T);

  for (std::size_t s = 0; s < burn_in + T; ++s) {
    const double e = model.innovation().draw(rng);
    const double y = lagged_sum(beta, level) + e;
    const double dy = lagged_sum(beta1, level) + lagged_sum(beta, first);
    double d2y = 0.0;
    if (max_order == 2) {
      d2y = lagged_sum(beta2, level) + 2.0 * lagged_sum(beta1, first) + lagged_sum(beta, second);
    }
    push_front(level, y);
    push_front(first, dy);
    push_front(second, d2y);
    if (s >= burn_in) {
      out.level.push_back(y);
      out.d1.push_back(dy);
      if (max_order == 2) out.d2.push_back(d2y);
    }
  }
  return out;
}

std::vector<double> derivative_process(const TvModel& model, double u0, int order, std::size_t T,
                                       std::uint64_t seed, std::size_t burn_in) {
  DerivativePaths paths = joint_derivative_paths(model, u0, T, burn_in, seed, order);
  return order == 1 ? std::move(paths.d1) : std::move(paths.d2);
}

std::vector<double> tvma_coefficients(const TvModel& model, std::size_t t, std::size_t T, std::size_t L) {
  if (model.order() != 1) throw ConfigError("MA coefficients are only available for tvAR(1)");
  if (T == 0) throw ConfigError("T must be positive");
  std::vector<double> psi(L + 1);
  psi[0] = 1.0;
  for (std::size_t l = 1; l <= L; ++l) {
    const double u = (static_cast<double>(t) - static_cast<double>(l - 1)) / static_cast<double>(T);
    psi[l] = psi[l - 1] * model.beta(0, u);
  }
  return psi;
}

double sup_abs_beta1(const TvModel& model) {
  double rho = 0.0;
  constexpr std::size_t grid = 10000;
  for (std::size_t i = 0; i <= grid; ++i) {
    rho = std::max(rho, std::abs(model.beta(0, static_cast<double>(i) / grid)));
  }
  return rho;
}

double lipschitz_beta1(const TvModel& model) {
  constexpr std::size_t grid = 10000;
  double lip = 0.0;
  double prev = model.beta(0, 0.0);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double cur = model.beta(0, static_cast<double>(i) / grid);
    lip = std::max(lip, std::abs(cur - prev) * grid);
    prev = cur;
  }
  return lip;
}

std::size_t default_ma_truncation(double rho) {
  if (rho <= 0.0) return 1;
  if (rho >= 1.0) throw ConfigError("MA truncation requires sup|beta_1| < 1");
  return static_cast<std::size_t>(std::floor(std::log(1e-12) / std::log(rho))) + 1;
}

bool GapReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(), [](const GapEntry& e) { return e.holds; });
}

GapReport approximation_gap_check(const TvModel& model, double u0, std::size_t T, std::size_t L,
                                  std::uint64_t seed) {
  if (model.order() != 1) throw ConfigError("approximation gap check is only available for tvAR(1)");
  if (!(u0 > 0.0 && u0 < 1.0)) throw ConfigError("u0 must lie in (0, 1)");

  GapReport report;
  report.rho = sup_abs_beta1(model);
  if (report.rho >= 1.0) throw ConfigError("approximation gap check requires sup|beta_1| < 1");
  // Secant slopes on a grid never exceed the true Lipschitz constant; pad slightly.
  report.lipschitz = lipschitz_beta1(model) * (1.0 + 1e-6);
  report.c0 = report.rho > 0.0 ? report.lipschitz / report.rho : 0.0;
  report.truncation = L;

  // Shock stream identical to simulate_tvar(model, T, L, seed): draws for times 1-L .. T.
  const std::vector<double> shocks = sample_innovations(model.innovation(), L + T, seed);
  const auto shock_at = [&](long time) { return shocks[static_cast<std::size_t>(time + static_cast<long>(L) - 1)]; };

  const double beta0 = model.beta(0, u0);
  const double dT = static_cast<double>(T);
  for (std::size_t t = 1; t <= T; ++t) {
    const double dist = std::abs(static_cast<double>(t) / dT - u0);
    if (!(dist < 1.0 / dT)) continue;
    const std::vector<double> psi = tvma_coefficients(model, t, T, L);
    double gap = 0.0;
    double envelope = 0.0;
    double frozen_power = 1.0;
    double rho_power = 1.0;
    const long max_lag = std::min<long>(static_cast<long>(L), static_cast<long>(t) + static_cast<long>(L) - 1);
    for (long l = 0; l <= max_lag; ++l) {
      const double e = shock_at(static_cast<long>(t) - l);
      gap += (psi[static_cast<std::size_t>(l)] - frozen_power) * e;
      const double growth = std::max(1.0, 0.5 * static_cast<double>(l) * static_cast<double>(l + 1));
      envelope += rho_power * growth * std::abs(e);
      frozen_power *= beta0;
      rho_power *= report.rho;
    }
    GapEntry entry;
    entry.t = t;
    entry.lhs = std::abs(gap);
    entry.rhs = report.c0 * (dist + 1.0 / dT) * envelope;
    entry.ratio = entry.rhs > 0.0 ? entry.lhs / entry.rhs : (entry.lhs == 0.0 ? 0.0 : INFINITY);
    entry.holds = entry.lhs <= entry.rhs;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace tvlad
