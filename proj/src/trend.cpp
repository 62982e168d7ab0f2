#include "sttrend/trend.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "sttrend/csv.hpp"
#include "sttrend/error.hpp"

namespace sttrend {

std::string_view to_string(TrendMethod m) {
  switch (m) {
    case TrendMethod::OLS: return "OLS";
    case TrendMethod::SEstimator: return "SEstimator";
    case TrendMethod::SenMK: return "SenMK";
  }
  return "?";
}

namespace {

void require_complete(std::span<const double> y, const char* what) {
  for (double v : y) {
    if (is_missing(v)) throw DataError(std::string(what) + ": series contains missing values");
  }
}

std::span<const double> checked(const RegularSeries& s, const char* what) {
  if (s.missing_count() > 0) {
    throw DataError(std::string(what) + ": series " + s.station() + " contains missing values");
  }
  return s.values();
}

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

// 1 - SS_res/SS_tot for the line a + b t, floored at 0; 0 for constant y.
double line_r_squared(std::span<const double> y, double intercept, double slope) {
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i + 1);
    ss_tot += (y[i] - mean) * (y[i] - mean);
    const double r = y[i] - intercept - slope * t;
    ss_res += r * r;
  }
  if (ss_tot == 0.0) return 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

}  // namespace

TrendFit ols_trend(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) throw DataError("OLS trend needs at least 3 points");
  require_complete(y, "OLS trend");
  const double dn = static_cast<double>(n);
  const double tbar = (dn + 1.0) / 2.0;
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= dn;
  double sxx = 0.0;
  double sxy = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i + 1) - tbar;
    sxx += dt * dt;
    sxy += dt * (y[i] - ybar);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  TrendFit fit;
  fit.method = TrendMethod::OLS;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * tbar;
  if (ss_tot == 0.0) {
    fit.slope = 0.0;
    fit.intercept = ybar;
    fit.r_squared = 0.0;
    fit.p_value = 1.0;
    return fit;
  }
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * static_cast<double>(i + 1);
    ss_res += r * r;
  }
  fit.r_squared = std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
  const double se = std::sqrt(ss_res / (dn - 2.0) / sxx);
  if (se == 0.0) {
    fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
  } else {
    const boost::math::students_t dist(dn - 2.0);
    const double t = std::abs(fit.slope / se);
    fit.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
  }
  fit.significant_5pct = fit.p_value < 0.05;
  return fit;
}

MKResult mann_kendall(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 3) throw DataError("Mann-Kendall test needs at least 3 points");
  require_complete(y, "Mann-Kendall test");
  MKResult r;
  r.n = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      r.s_statistic += (y[j] > y[i]) - (y[j] < y[i]);
    }
  }
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const std::size_t t = j - i;
    if (t > 1) {
      r.tie_groups.push_back(t);
      const double dt = static_cast<double>(t);
      tie_term += dt * (dt - 1.0) * (2.0 * dt + 5.0);
    }
    i = j;
  }
  const double dn = static_cast<double>(n);
  r.variance = (dn * (dn - 1.0) * (2.0 * dn + 5.0) - tie_term) / 18.0;
  if (r.variance <= 0.0) throw DataError("Mann-Kendall test: all values identical (zero variance)");
  const double s = static_cast<double>(r.s_statistic);
  if (r.s_statistic > 0) {
    r.z_score = (s - 1.0) / std::sqrt(r.variance);
  } else if (r.s_statistic < 0) {
    r.z_score = (s + 1.0) / std::sqrt(r.variance);
  }
  r.p_value = std::clamp(normal_two_sided_p(r.z_score), 0.0, 1.0);
  return r;
}

TrendFit sens_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw DataError("Sen's slope needs at least one pair of points");
  require_complete(y, "Sen's slope");
  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      slopes.push_back((y[j] - y[k]) / static_cast<double>(j - k));
    }
  }
  TrendFit fit;
  fit.method = TrendMethod::SenMK;
  fit.slope = median_inplace(slopes);
  std::vector<double> offsets(n);
  for (std::size_t i = 0; i < n; ++i) offsets[i] = y[i] - fit.slope * static_cast<double>(i + 1);
  fit.intercept = median_inplace(offsets);
  fit.r_squared = line_r_squared(y, fit.intercept, fit.slope);
  const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (n >= 3 && !constant) fit.p_value = mann_kendall(y).p_value;
  fit.significant_5pct = fit.p_value < 0.05;
  return fit;
}

Lag1Result lag1_check(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 4) throw DataError("lag-1 check needs at least 4 points");
  require_complete(y, "lag-1 check");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    den += (y[i] - mean) * (y[i] - mean);
    if (i + 1 < n) num += (y[i] - mean) * (y[i + 1] - mean);
  }
  if (den == 0.0) throw DataError("lag-1 check: zero variance");
  Lag1Result r;
  r.r1 = std::clamp(num / den, -1.0, 1.0);
  r.significant = std::abs(r.r1) > 1.96 / std::sqrt(static_cast<double>(n));
  return r;
}

TrendFit ols_trend(const RegularSeries& s) { return ols_trend(checked(s, "OLS trend")); }
TrendFit s_estimator_trend(const RegularSeries& s, const SEstimatorOptions& opts) {
  return s_estimator_trend(checked(s, "S-estimator trend"), opts);
}
MKResult mann_kendall(const RegularSeries& s) { return mann_kendall(checked(s, "Mann-Kendall test")); }
TrendFit sens_slope(const RegularSeries& s) { return sens_slope(checked(s, "Sen's slope")); }
ShapiroResult shapiro_wilk(const RegularSeries& s) { return shapiro_wilk(checked(s, "Shapiro-Wilk test")); }
Lag1Result lag1_check(const RegularSeries& s) { return lag1_check(checked(s, "lag-1 check")); }

TrendReport trend_report(const RegularSeries& series, std::string window, const SEstimatorOptions& opts) {
  const auto y = checked(series, "trend report");
  TrendReport r;
  r.station = series.station();
  r.window = std::move(window);
  r.ols = ols_trend(y);
  r.s_estimator = s_estimator_trend(y, opts);
  r.mk = mann_kendall(y);
  r.sen = sens_slope(y);
  const ShapiroResult sw = shapiro_wilk(y);
  r.precheck.shapiro_w = sw.w;
  r.precheck.shapiro_p = sw.p_value;
  const Lag1Result lag = lag1_check(y);
  r.precheck.lag1_autocorr = lag.r1;
  r.precheck.lag1_significant = lag.significant;
  return r;
}

std::string_view significance_stars(double p_value) {
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

std::string trend_csv_header() {
  return "station,window,ols_slope,ols_r2,ols_p,s_slope,s_r2,s_p,sen_slope,sen_r2,mk_p,shapiro_p,lag1,lag1_sig";
}

std::string trend_csv_row(const TrendReport& r) {
  using csv::fixed;
  return csv::join({r.station, r.window, fixed(r.ols.slope, 4), fixed(r.ols.r_squared, 4),
                    fixed(r.ols.p_value, 4), fixed(r.s_estimator.slope, 4), fixed(r.s_estimator.r_squared, 4),
                    fixed(r.s_estimator.p_value, 4), fixed(r.sen.slope, 4), fixed(r.sen.r_squared, 4),
                    fixed(r.mk.p_value, 4), fixed(r.precheck.shapiro_p, 4), fixed(r.precheck.lag1_autocorr, 4),
                    r.precheck.lag1_significant ? "1" : "0"});
}

}  // namespace sttrend
