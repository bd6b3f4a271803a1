#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "tvlad/bootstrap.hpp"
#include "tvlad/errors.hpp"
#include "tvlad/innovations.hpp"
#include "tvlad/parallel.hpp"
#include "tvlad/process.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using tvlad::EstimationConfig;
using tvlad::InnovationSpec;
using tvlad::MultiplierSpec;

namespace {

EstimationConfig lsw2q2() {
  EstimationConfig c;
  c.weight = tvlad::WeightSpec::smooth_indicator_quantile(0.9);
  return c;
}

tvlad::BootstrapEnsemble ensemble_from(const Eigen::MatrixXd& reps, std::size_t p, std::size_t points) {
  tvlad::BootstrapEnsemble e;
  e.replicates = reps;
  e.order = p;
  e.points.assign(points, 0.5);
  return e;
}

}  // namespace

TEST_CASE("multiplier laws", "[bootstrap]") {
  CHECK_THROWS_AS(MultiplierSpec::two_point(0.0, 3.0), tvlad::ConfigError);
  CHECK_THROWS_AS(MultiplierSpec::two_point(-1.0, 3.0), tvlad::ConfigError);
  tvlad::Rng rng(4);
  const auto tp = MultiplierSpec::two_point();
  double s = 0, s2 = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double z = MultiplierSpec::exponential().draw(rng);
    s += z;
    s2 += z * z;
    const double w = tp.draw(rng);
    if (w != 0.0 && w != 2.0) FAIL("two-point draw off its atoms");
  }
  CHECK_THAT(s / 1e6, WithinAbs(1.0, 0.005));
  CHECK_THAT(s2 / 1e6 - 1.0, WithinAbs(1.0, 0.02));
}

TEST_CASE("unit multipliers reproduce the base fit", "[bootstrap]") {
  const auto s = tvlad::simulate_tvar(tvlad::sine_tvar1(InnovationSpec::cauchy()), 1000, 500, 3);
  const std::vector<double> points{0.3};
  const auto ens = tvlad::bootstrap_replicates(s.values, points, lsw2q2(), 20, MultiplierSpec::two_point(1.0, 1.0), 1);
  REQUIRE(ens.replicates.rows() == 20);
  for (Eigen::Index k = 0; k < 20; ++k) CHECK(ens.replicates(k, 0) == ens.base_fits[0].beta_hat[0]);
  CHECK(tvlad::bootstrap_covariance(ens).isZero(0.0));
}

TEST_CASE("ensembles are reproducible and thread independent", "[bootstrap]") {
  const auto s = tvlad::simulate_tvar(tvlad::sine_tvar2(InnovationSpec::student_t(2.0)), 800, 500, 5);
  const std::vector<double> points{0.3, 0.7};
  EstimationConfig config = lsw2q2();
  config.order = 2;
  tvlad::BootstrapEnsemble a, b;
  {
    tvlad::ScopedThreadCount one(1);
    a = tvlad::bootstrap_replicates(s.values, points, config, 60, MultiplierSpec::exponential(), 77);
  }
  {
    tvlad::ScopedThreadCount four(4);
    b = tvlad::bootstrap_replicates(s.values, points, config, 60, MultiplierSpec::exponential(), 77);
  }
  CHECK(a.replicates == b.replicates);
  CHECK(a.replicates.cols() == 4);
  const auto c = tvlad::bootstrap_replicates(s.values, points, config, 60, MultiplierSpec::exponential(), 78);
  CHECK(a.replicates != c.replicates);
  CHECK(a.block(1) == a.replicates.rightCols(2));
}

TEST_CASE("Gaussian multipliers are clamped and counted", "[bootstrap]") {
  const auto s = tvlad::simulate_tvar(tvlad::sine_tvar1(InnovationSpec::gaussian()), 500, 500, 5);
  const std::vector<double> points{0.5};
  const auto ens = tvlad::bootstrap_replicates(s.values, points, EstimationConfig{}, 20, MultiplierSpec::gaussian(), 3);
  // about 16% of the 499 draws per replicate fall below zero
  CHECK(ens.clamped > 20 * 499 / 10);
  CHECK(ens.clamped < 20 * 499 / 4);
}

TEST_CASE("bootstrap covariance", "[bootstrap]") {
  const Eigen::MatrixXd three = (Eigen::MatrixXd(3, 1) << 1.0, 2.0, 3.0).finished();
  CHECK_THAT(tvlad::bootstrap_covariance(ensemble_from(three, 1, 1))(0, 0), WithinAbs(1.0, 1e-15));

  const Eigen::MatrixXd two = (Eigen::MatrixXd(2, 2) << 1.0, 4.0, 3.0, 1.0).finished();
  const Eigen::Vector2d d(1.0 - 3.0, 4.0 - 1.0);
  CHECK((tvlad::bootstrap_covariance(ensemble_from(two, 2, 1)) - d * d.transpose() / 2.0).norm() < 1e-14);

  const Eigen::MatrixXd same = Eigen::MatrixXd::Constant(5, 2, 0.7);
  CHECK(tvlad::bootstrap_covariance(ensemble_from(same, 2, 1)).isZero(1e-15));
}

TEST_CASE("Wald statistic", "[bootstrap]") {
  const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, 0.4);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Constant(1, 1, 0.04);
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(1, 1);
  const auto w = tvlad::wald_test(b, v, r, Eigen::VectorXd::Zero(1));
  CHECK_THAT(w.statistic, WithinRel(4.0, 1e-12));
  CHECK(w.df == 1);
  CHECK_THAT(w.p_value, WithinRel(0.04550026389635842, 1e-8));
  const auto null = tvlad::wald_test(b, v, r, b);
  CHECK(null.statistic == 0.0);
  CHECK(null.p_value == 1.0);

  const Eigen::Vector2d b2(1.0, 2.0);
  const Eigen::Matrix2d v2 = (Eigen::Matrix2d() << 2.0, 0.3, 0.3, 1.0).finished();
  const Eigen::Matrix2d r2 = Eigen::Matrix2d::Identity();
  const auto two = tvlad::wald_test(b2, v2, r2, Eigen::Vector2d::Zero());
  CHECK_THAT(two.statistic, WithinRel(b2.dot(v2.inverse() * b2), 1e-12));
  CHECK_THAT(two.p_value, WithinRel(std::exp(-two.statistic / 2), 1e-9));
}

TEST_CASE("Bonferroni critical values", "[bootstrap]") {
  CHECK_THAT(tvlad::bonferroni_critical(0.01, 8, 2), WithinAbs(13.3692, 1e-4));
  CHECK_THAT(tvlad::bonferroni_critical(0.10, 28, 2), WithinAbs(11.2696, 1e-4));
  CHECK_THAT(tvlad::bonferroni_critical(0.01, 28, 2), WithinAbs(15.8747, 1e-4));
  // chi2_2 upper tail is exp(-x / 2)
  CHECK_THAT(tvlad::bonferroni_critical(0.01, 8, 2), WithinRel(-2 * std::log(0.01 / 8), 1e-10));
  CHECK_THAT(tvlad::bonferroni_critical(0.05, 1, 1), WithinRel(3.841458820694124, 1e-9));
  const Eigen::Vector2d b(std::sqrt(13.3692 / 2), std::sqrt(13.3692 / 2));
  const auto w = tvlad::wald_test(b, Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero());
  CHECK_THAT(w.p_value, WithinRel(0.01 / 8, 1e-4));
}

TEST_CASE("confidence regions", "[bootstrap]") {
  const Eigen::Vector2d center(0.3, -0.1);
  const Eigen::Matrix2d cov = (Eigen::Matrix2d() << 0.02, 0.005, 0.005, 0.01).finished();
  const auto r90 = tvlad::confidence_region(center, cov, 0.10);
  const auto r95 = tvlad::confidence_region(center, cov, 0.05);
  CHECK(r90.contains(center));
  CHECK(r95.contains(center));
  CHECK_THAT(r90.radius2, WithinRel(-2 * std::log(0.10), 1e-10));
  CHECK(r95.radius2 > r90.radius2);
  tvlad::Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector2d b(center[0] + 0.5 * rng.normal(), center[1] + 0.5 * rng.normal());
    const Eigen::Vector2d d = b - center;
    CHECK_THAT(r90.criterion(b), WithinRel(d.dot(cov.inverse() * d), 1e-10));
    if (r90.contains(b)) CHECK(r95.contains(b));
  }
}

TEST_CASE("equivalence statistic on identical windows", "[bootstrap]") {
  // second half repeats the first, so both windows see the same data
  const auto s = tvlad::simulate_tvar(tvlad::sine_tvar1(InnovationSpec::cauchy()), 500, 500, 8);
  std::vector<double> y = s.values;
  y.insert(y.end(), s.values.begin(), s.values.end());
  const auto report = tvlad::equivalence_test(y, 0.25, 0.75, lsw2q2(), 200, MultiplierSpec::exponential(), 4);
  CHECK(report.difference.isZero(0.0));
  CHECK(report.statistic == 0.0);
  CHECK(report.p_value == 1.0);
  for (const auto& d : report.decisions) CHECK_FALSE(d.reject);
  CHECK_THROWS_AS(tvlad::equivalence_test(y, 0.3, 0.3, lsw2q2(), 50, MultiplierSpec::exponential(), 4),
                  tvlad::ConfigError);
}

TEST_CASE("equivalence statistic against a direct computation", "[bootstrap]") {
  const auto s = tvlad::simulate_tvar(tvlad::sine_tvar1(InnovationSpec::cauchy(), 0.8, 2.0), 1000, 500, 12);
  const std::vector<double> points{0.2, 0.8};
  const auto ens = tvlad::bootstrap_replicates(s.values, points, lsw2q2(), 300, MultiplierSpec::exponential(), 6);
  const auto report = tvlad::equivalence_from_ensemble(ens);
  const double th = 1000.0 * std::log(1000.0) / std::pow(1000.0, 0.6);
  const double d = ens.base_fits[0].beta_hat[0] - ens.base_fits[1].beta_hat[0];
  const auto rows = ens.replicates.rows();
  double xi = 0;
  for (Eigen::Index k = 0; k < rows; ++k) {
    const double dk = ens.replicates(k, 0) - ens.replicates(k, 1) - d;
    xi += dk * dk;
  }
  xi *= th / static_cast<double>(rows);
  CHECK_THAT(report.th, WithinRel(th, 1e-12));
  CHECK_THAT(report.xi(0, 0), WithinRel(xi, 1e-10));
  CHECK_THAT(report.statistic, WithinRel(th * d * d / xi, 1e-10));
  CHECK_THAT(report.p_value, WithinRel(std::erfc(std::sqrt(report.statistic / 2)), 1e-8));
  CHECK(report.decisions.size() == 3);
  CHECK(report.p_value < 0.01);
  for (const auto& dec : report.decisions) CHECK(dec.reject);
}

TEST_CASE("bandwidth side condition", "[bootstrap]") {
  const double h = 0.1;
  const double a = tvlad::tail_quantile_a(InnovationSpec::cauchy(), 100);
  CHECK_THAT(tvlad::bandwidth_side_condition(InnovationSpec::cauchy(), 1000, h), WithinRel(h * a, 1e-12));
}
