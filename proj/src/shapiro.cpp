// Shapiro-Wilk W test with Royston's (1995) AS R94 approximations for the
// coefficients and the significance level, valid for 3 <= n <= 5000.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "sttrend/error.hpp"
#include "sttrend/trend.hpp"

namespace sttrend {

namespace {

// c[0] + c[1] x + c[2] x^2 + ...
template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t i = N; i-- > 0;) r = r * x + c[i];
  return r;
}

constexpr double kG[] = {-2.273, 0.459};
constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};

// Coefficients a_1..a_{n/2} for the lower half of the order statistics.
std::vector<double> coefficients(std::size_t n) {
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
    return a;
  }
  const boost::math::normal standard;
  const double an = static_cast<double>(n);
  std::vector<double> m(half);
  double summ2 = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    m[i] = boost::math::quantile(standard, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    summ2 += m[i] * m[i];
  }
  summ2 *= 2.0;
  const double ssumm2 = std::sqrt(summ2);
  const double rsn = 1.0 / std::sqrt(an);
  const double a1 = poly(kC1, rsn) - m[0] / ssumm2;
  std::size_t first_scaled;
  double fac;
  if (n > 5) {
    first_scaled = 2;
    const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    a[1] = a2;
  } else {
    first_scaled = 1;
    fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
  }
  a[0] = a1;
  for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
  return a;
}

}  // namespace

ShapiroResult shapiro_wilk(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3 || n > 5000) throw DataError("Shapiro-Wilk test needs 3 <= n <= 5000");
  std::vector<double> x(y.begin(), y.end());
  for (double v : x) {
    if (is_missing(v)) throw DataError("Shapiro-Wilk test: series contains missing values");
  }
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw DataError("Shapiro-Wilk test: zero variance");

  const std::vector<double> a = coefficients(n);
  double mean = 0.0;
  for (double v : x) mean += v / range;
  mean /= static_cast<double>(n);
  double ssq = 0.0;
  for (double v : x) ssq += (v / range - mean) * (v / range - mean);
  double num = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * (x[n - 1 - i] - x[i]) / range;

  ShapiroResult r;
  r.w = std::clamp(num * num / ssq, 0.0, 1.0);
  if (r.w <= 0.0) r.w = std::numeric_limits<double>::min();

  const double an = static_cast<double>(n);
  if (n == 3) {
    constexpr double pi6 = 6.0 / M_PI;
    constexpr double stqr = M_PI / 3.0;
    r.p_value = std::clamp(pi6 * (std::asin(std::sqrt(r.w)) - stqr), 0.0, 1.0);
    return r;
  }
  if (r.w >= 1.0) {
    r.p_value = 1.0;
    return r;
  }
  double w1 = std::log(1.0 - r.w);
  double mu;
  double sigma;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (w1 >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    w1 = -std::log(gamma - w1);
    mu = poly(kC3, an);
    sigma = std::exp(poly(kC4, an));
  } else {
    const double ln = std::log(an);
    mu = poly(kC5, ln);
    sigma = std::exp(poly(kC6, ln));
  }
  r.p_value = std::clamp(0.5 * std::erfc((w1 - mu) / sigma / std::sqrt(2.0)), 0.0, 1.0);
  return r;
}

}  // namespace sttrend
