#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sttrend/series.hpp"

namespace sttrend {

enum class TrendMethod { OLS, SEstimator, SenMK };

std::string_view to_string(TrendMethod m);

/// Linear trend y = intercept + slope * t over t = 1..n.
struct TrendFit {
  TrendMethod method = TrendMethod::OLS;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double p_value = 1.0;
  bool significant_5pct = false;
  /// Robust residual scale; S-estimator only.
  double scale = 0.0;
};

struct MKResult {
  std::int64_t s_statistic = 0;
  double variance = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::vector<std::size_t> tie_groups;
};

struct ShapiroResult {
  double w = 1.0;
  double p_value = 1.0;
};

struct Lag1Result {
  double r1 = 0.0;
  bool significant = false;
};

struct PrecheckReport {
  double shapiro_w = 1.0;
  double shapiro_p = 1.0;
  double lag1_autocorr = 0.0;
  bool lag1_significant = false;
};

struct SEstimatorOptions {
  std::uint64_t seed = 20240611;
  int starts = 50;
  int keep = 5;
  int max_iterations = 200;
};

/// Tukey biweight tuning constant for 50% breakdown.
inline constexpr double kBiweightC = 1.547;

/// E[rho(Z)] for standard normal Z with the normalized biweight rho.
double biweight_consistency_k();

/// Normalized Tukey biweight, rising from 0 at u = 0 to 1 at |u| >= c.
double biweight_rho(double u);

/// M-scale s solving mean(rho(r_i / s)) = k by bisection; 0 on an exact fit.
double m_scale(std::span<const double> residuals);

// The span overloads regress values on t = 1..n and reject NaN input.
TrendFit ols_trend(std::span<const double> y);
TrendFit s_estimator_trend(std::span<const double> y, const SEstimatorOptions& opts = {});
MKResult mann_kendall(std::span<const double> y);
TrendFit sens_slope(std::span<const double> y);
ShapiroResult shapiro_wilk(std::span<const double> y);
Lag1Result lag1_check(std::span<const double> y);

TrendFit ols_trend(const RegularSeries& series);
TrendFit s_estimator_trend(const RegularSeries& series, const SEstimatorOptions& opts = {});
MKResult mann_kendall(const RegularSeries& series);
TrendFit sens_slope(const RegularSeries& series);
ShapiroResult shapiro_wilk(const RegularSeries& series);
Lag1Result lag1_check(const RegularSeries& series);

struct TrendReport {
  std::string station;
  std::string window;
  TrendFit ols;
  TrendFit s_estimator;
  TrendFit sen;
  MKResult mk;
  PrecheckReport precheck;
};

TrendReport trend_report(const RegularSeries& series, std::string window,
                         const SEstimatorOptions& opts = {});

/// "*" when significant at 5%, "**" at 1%, empty otherwise.
std::string_view significance_stars(double p_value);

/// `station,window,ols_slope,...,lag1,lag1_sig` header and row.
std::string trend_csv_header();
std::string trend_csv_row(const TrendReport& r);

}  // namespace sttrend
