#include "doctest.h"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <random>

#include "shapiro_reference.hpp"
#include "sttrend/error.hpp"
#include "sttrend/trend.hpp"

using namespace sttrend;

TEST_CASE("shapiro-wilk agrees with recorded reference values") {
  for (const auto& ref : kShapiroReference) {
    CAPTURE(ref.name);
    const auto r = shapiro_wilk(ref.x);
    CHECK(std::abs(r.w - ref.w) <= 1e-3);
    CHECK(std::abs(r.p_value - ref.p) <= 2e-3);
  }
}

TEST_CASE("shapiro-wilk on normal quantiles and with a gross outlier") {
  boost::math::normal nd;
  std::vector<double> q(20);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = quantile(nd, (static_cast<double>(i + 1) - 0.375) / 20.25);
  const auto a = shapiro_wilk(q);
  CHECK(a.w == doctest::Approx(0.99718).epsilon(1e-4));
  CHECK(a.p_value > 0.9);

  // 19 standard normal draws plus one value at +8; scipy gives p = 0.000502.
  const std::vector<double> spiked{-0.025946, -1.531163, 0.441222, 0.786914, 1.710245, -1.147532, 0.400094,
                                   0.555981,  0.228338,  1.531639, -2.352728, 2.87987, 0.933114,  -0.723857,
                                   -0.004115, 0.881548,  0.508398, -0.86646,  -0.45287, 8.0};
  const auto b = shapiro_wilk(spiked);
  CHECK(b.w == doctest::Approx(0.7839187).epsilon(1e-3));
  CHECK(std::abs(b.p_value - 0.000502) <= 2e-3);
  CHECK(b.p_value < 0.01);
}

TEST_CASE("shapiro-wilk range contract and errors") {
  std::mt19937_64 rng(1);
  std::exponential_distribution<double> ed(1.0);
  for (std::size_t n : {3u, 4u, 5u, 11u, 12u, 100u, 1000u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = ed(rng);
    const auto r = shapiro_wilk(x);
    CHECK(r.w > 0.0);
    CHECK(r.w <= 1.0);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
  }
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>{1, 2}), DataError);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(10, 4.0)), DataError);
  CHECK_THROWS_AS(shapiro_wilk(std::vector<double>(5001, 1.0)), DataError);
}
