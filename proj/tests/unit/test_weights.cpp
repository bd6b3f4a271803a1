#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tvlad/errors.hpp"
#include "tvlad/weights.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using tvlad::WeightSpec;

TEST_CASE("closed-form weight values", "[weights]") {
  const std::vector<double> zero{0.0};
  CHECK(tvlad::weight_value(WeightSpec::ling(0.5), zero) == 1.0);
  const std::vector<double> x{1.0, 1.0};
  CHECK_THAT(tvlad::weight_value(WeightSpec::ling(0.5), x), WithinRel(std::pow(2.0, -1.5), 1e-14));
  const std::vector<double> three{3.0};
  CHECK_THAT(tvlad::weight_value(WeightSpec::smooth_indicator(3.0), three), WithinAbs(0.5, 1e-15));
  const std::vector<double> past(50, 0.0);
  CHECK(tvlad::weight_value(WeightSpec::pan(), zero, std::span<const double>(past)) == 1.0);
  CHECK(tvlad::weight_value(WeightSpec::unit(), x) == 1.0);
}

TEST_CASE("weights stay in (0, 1]", "[weights]") {
  const std::vector<WeightSpec> specs{WeightSpec::ling(0.5), WeightSpec::ling(0.1), WeightSpec::unit()};
  for (double v : {0.0, 0.3, 2.9, 4.5, 1e3, 1e12}) {
    const std::vector<double> x{v, -v / 2};
    for (const auto& spec : specs) {
      const double w = tvlad::weight_value(spec, x);
      CHECK(w > 0.0);
      CHECK(w <= 1.0);
    }
    const double s = tvlad::weight_value(WeightSpec::smooth_indicator(3.0), x);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    if (std::hypot(v, v / 2) > 4.0) CHECK(s == 0.0);
    const std::vector<double> past{v, -v, 1.0, v};
    const double w = tvlad::weight_value(WeightSpec::pan(), x, std::span<const double>(past));
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
}

TEST_CASE("smooth step", "[weights]") {
  CHECK(tvlad::smooth_step(-2.0) == 0.0);
  CHECK(tvlad::smooth_step(2.0) == 1.0);
  CHECK(tvlad::smooth_step(0.0) == 0.5);
  CHECK_THAT(tvlad::smooth_step(0.5), WithinAbs(-0.25 * 0.125 + 0.375 + 0.5, 1e-15));
  CHECK_THAT(tvlad::smooth_step_derivative(0.5), WithinAbs(-0.75 * 0.25 + 0.75, 1e-15));
  CHECK(tvlad::smooth_step_derivative(1.5) == 0.0);
}

TEST_CASE("weight gradients match central differences", "[weights]") {
  const std::vector<WeightSpec> specs{WeightSpec::ling(0.5), WeightSpec::smooth_indicator(3.0)};
  const std::vector<std::vector<double>> points{{0.7, -1.2}, {2.0, 1.9}, {-0.1, 0.4}};
  for (const auto& spec : specs) {
    for (const auto& x : points) {
      const Eigen::VectorXd g = tvlad::weight_gradient(spec, x);
      for (std::size_t j = 0; j < x.size(); ++j) {
        auto up = x, down = x;
        up[j] += 1e-6;
        down[j] -= 1e-6;
        const double fd = (tvlad::weight_value(spec, up) - tvlad::weight_value(spec, down)) / 2e-6;
        CHECK_THAT(g[static_cast<Eigen::Index>(j)], WithinAbs(fd, 1e-7));
      }
    }
  }
  CHECK(tvlad::weight_gradient(WeightSpec::unit(), std::vector<double>{1.0, 2.0}).isZero());
}

TEST_CASE("quantile cutoffs", "[weights]") {
  std::vector<double> ys;
  for (int i = 1; i <= 100; ++i) ys.push_back(i % 2 ? i : -i);
  CHECK_THAT(tvlad::resolve_quantile_cutoff(ys, 0.90).value, WithinAbs(90.1, 1e-12));
  CHECK_THAT(tvlad::resolve_quantile_cutoff(std::vector<double>{-3, -1, 1, 3}, 0.5).value, WithinAbs(2.0, 1e-15));
  CHECK(tvlad::resolve_quantile_cutoff(std::vector<double>{5, -5, 5}, 0.3).value == 5.0);
  CHECK(tvlad::resolve_quantile_cutoff(std::vector<double>{0, 0, 0}, 0.3).degenerate);

  const auto resolved = tvlad::resolve_weight(WeightSpec::smooth_indicator_quantile(0.9), ys);
  REQUIRE(resolved.c);
  CHECK_THAT(*resolved.c, WithinAbs(90.1, 1e-12));
  CHECK(resolved.resolved());
  CHECK_FALSE(WeightSpec::smooth_indicator_quantile(0.9).resolved());
}

TEST_CASE("invalid weight parameters", "[weights]") {
  CHECK_THROWS_AS(WeightSpec::ling(0.0), tvlad::ConfigError);
  CHECK_THROWS_AS(WeightSpec::smooth_indicator(-1.0), tvlad::ConfigError);
  CHECK_THROWS_AS(WeightSpec::smooth_indicator_quantile(1.0), tvlad::ConfigError);
}

TEST_CASE("moment supremum probe", "[weights]") {
  const auto ling = tvlad::assumption3_supremum(WeightSpec::ling(0.5), 1, 1000.0, 4000);
  CHECK(ling.finite);
  const auto smooth = tvlad::assumption3_supremum(WeightSpec::smooth_indicator(3.0), 1, 1000.0, 4000);
  CHECK(smooth.finite);
  CHECK(smooth.argmax_norm <= 4.0);
  CHECK(smooth.outer_max == 0.0);
  CHECK_FALSE(tvlad::assumption3_supremum(WeightSpec::unit(), 1, 1000.0, 4000).finite);
}

TEST_CASE("Epanechnikov kernel moments", "[weights]") {
  const tvlad::KernelSpec k;
  CHECK(tvlad::kernel_value(k, 0.0) == 0.75);
  CHECK(tvlad::kernel_value(k, 1.0) == 0.0);
  CHECK(tvlad::kernel_value(k, -1.5) == 0.0);
  const auto quad = [](auto f) { return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -1.0, 1.0); };
  const auto K = [](double u) { return 0.75 * (1 - u * u); };
  CHECK_THAT(tvlad::kernel_moment(k, 1, 0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(tvlad::kernel_moment(k, 2, 0), WithinAbs(quad([&](double u) { return K(u) * K(u); }), 1e-12));
  CHECK_THAT(tvlad::kernel_moment(k, 2, 0), WithinAbs(0.6, 1e-12));
  CHECK_THAT(tvlad::kernel_moment(k, 1, 2), WithinAbs(quad([&](double u) { return K(u) * u * u; }), 1e-12));
  CHECK_THAT(tvlad::kernel_moment(k, 1, 2), WithinAbs(0.2, 1e-12));
  CHECK_THAT(tvlad::kernel_moment(k, 1, 1), WithinAbs(0.0, 1e-15));
}
