// S-estimator of a linear trend with a Tukey biweight scale, fitted by
// random elemental starts followed by iteratively reweighted least squares.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "sttrend/error.hpp"
#include "sttrend/trend.hpp"

namespace sttrend {

double biweight_rho(double u) {
  const double x = (u / kBiweightC) * (u / kBiweightC);
  if (x >= 1.0) return 1.0;
  const double q = 1.0 - x;
  return 1.0 - q * q * q;
}

namespace {

// psi and psi' up to the common factor 6 / c^2, which cancels wherever used.
double biweight_psi(double u) {
  const double x = (u / kBiweightC) * (u / kBiweightC);
  if (x >= 1.0) return 0.0;
  return u * (1.0 - x) * (1.0 - x);
}

double biweight_dpsi(double u) {
  const double x = (u / kBiweightC) * (u / kBiweightC);
  if (x >= 1.0) return 0.0;
  return (1.0 - x) * (1.0 - 5.0 * x);
}

double biweight_weight(double u) {
  const double x = (u / kBiweightC) * (u / kBiweightC);
  if (x >= 1.0) return 0.0;
  return (1.0 - x) * (1.0 - x);
}

double compute_consistency_k() {
  using boost::math::quadrature::gauss_kronrod;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
  auto integrand = [&](double x) { return biweight_rho(x) * inv_sqrt_2pi * std::exp(-0.5 * x * x); };
  const double inf = std::numeric_limits<double>::infinity();
  // rho has kinks at +-c; integrate the smooth pieces separately.
  const double centre = gauss_kronrod<double, 31>::integrate(integrand, -kBiweightC, kBiweightC, 15, 1e-14);
  const double tail = gauss_kronrod<double, 31>::integrate(integrand, kBiweightC, inf, 15, 1e-14);
  return centre + 2.0 * tail;
}

constexpr double kExactFitTol = 1e-10;
constexpr double kRefineTol = 1e-7;

struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double scale = std::numeric_limits<double>::infinity();
  bool converged = false;
};

class Fitter {
 public:
  Fitter(std::span<const double> y, bool with_slope)
      : y_(y), with_slope_(with_slope), r_(y.size()), n_(static_cast<double>(y.size())) {
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    zero_tol_ = kExactFitTol * (1.0 + ymax);
  }

  double scale_of(const Line& l) {
    residuals(l);
    return scale();
  }

  // One reweighting step from `l`; returns false if the weighted system is singular.
  bool step(Line& l) {
    residuals(l);
    const double s = scale();
    l.scale = s;
    if (s == 0.0) return false;
    double sw = 0.0, swt = 0.0, swtt = 0.0, swy = 0.0, swty = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double w = biweight_weight(r_[i] / s);
      const double t = static_cast<double>(i + 1);
      sw += w;
      swt += w * t;
      swtt += w * t * t;
      swy += w * y_[i];
      swty += w * t * y_[i];
    }
    if (sw <= 0.0) return false;
    if (!with_slope_) {
      l.intercept = swy / sw;
      return true;
    }
    const double det = sw * swtt - swt * swt;
    if (!(det > 1e-12 * sw * swtt)) return false;
    l.slope = (sw * swty - swt * swy) / det;
    l.intercept = (swy - l.slope * swt) / sw;
    return true;
  }

  Line refine(Line l, int max_iterations) {
    l.converged = false;
    for (int it = 0; it < max_iterations; ++it) {
      const Line before = l;
      if (!step(l)) {
        // Exact fit or degenerate weights: the current line is final.
        l.scale = scale_of(l);
        l.converged = true;
        return l;
      }
      // Converged once the fitted line moves by a negligible fraction of the scale.
      const double shift = std::abs(l.intercept - before.intercept) + std::abs(l.slope - before.slope) * n_;
      if (shift <= kRefineTol * l.scale) {
        l.scale = scale_of(l);
        l.converged = true;
        return l;
      }
    }
    l.scale = scale_of(l);
    return l;
  }

 private:
  void residuals(const Line& l) {
    for (std::size_t i = 0; i < y_.size(); ++i) {
      r_[i] = y_[i] - l.intercept - l.slope * static_cast<double>(i + 1);
    }
  }

  double scale() {
    // Snap numerically zero residuals so exact fits are recognised.
    for (double& r : r_) {
      if (std::abs(r) <= zero_tol_) r = 0.0;
    }
    return m_scale(r_);
  }

  std::span<const double> y_;
  bool with_slope_;
  std::vector<double> r_;
  double n_;
  double zero_tol_ = 0.0;
};

// Location-only fit: the scale is a continuous function of one parameter, so
// scan the observed values and polish the best bracket with Brent's method.
Line best_location(std::span<const double> y) {
  Fitter fitter(y, false);
  std::vector<double> grid(y.begin(), y.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto scale_at = [&](double a) { return fitter.scale_of(Line{a, 0.0}); };
  std::size_t best = 0;
  double best_scale = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = scale_at(grid[i]);
    if (s < best_scale) {
      best_scale = s;
      best = i;
    }
  }
  Line l{grid[best], 0.0, best_scale, true};
  if (best_scale == 0.0 || grid.size() < 2) return l;
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const auto [a, s] = boost::math::tools::brent_find_minima(scale_at, lo, hi, 40);
  if (s < l.scale) {
    l.intercept = a;
    l.scale = s;
  }
  return l;
}

Line best_line(std::span<const double> y, const SEstimatorOptions& opts) {
  const std::size_t n = y.size();
  Fitter fitter(y, true);
  std::vector<Line> candidates;
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int s = 0; s < opts.starts; ++s) {
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    if (i > j) std::swap(i, j);
    Line l;
    l.slope = (y[j] - y[i]) / static_cast<double>(j - i);
    l.intercept = y[i] - l.slope * static_cast<double>(i + 1);
    candidates.push_back(l);
  }
  for (Line& l : candidates) {
    for (int k = 0; k < 2; ++k) {
      if (!fitter.step(l)) break;
    }
    l.scale = fitter.scale_of(l);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Line& a, const Line& b) { return a.scale < b.scale; });
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(opts.keep, 1)), candidates.size());
  Line best;
  for (std::size_t c = 0; c < keep; ++c) {
    Line refined = fitter.refine(candidates[c], opts.max_iterations);
    if (refined.scale < best.scale) best = refined;
  }
  if (!best.converged) {
    throw ConvergenceError("S-estimator did not converge within " + std::to_string(opts.max_iterations) +
                           " iterations");
  }
  return best;
}

}  // namespace

double biweight_consistency_k() {
  static const double k = compute_consistency_k();
  return k;
}

double m_scale(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n == 0) return 0.0;
  const double k = biweight_consistency_k();
  double max_abs = 0.0;
  std::size_t nonzero = 0;
  for (double r : residuals) {
    max_abs = std::max(max_abs, std::abs(r));
    if (r != 0.0) ++nonzero;
  }
  // As s -> 0 the mean of rho tends to the nonzero fraction; if that does not
  // exceed k there is no positive root and the fit is exact.
  if (static_cast<double>(nonzero) / static_cast<double>(n) <= k) return 0.0;
  auto excess = [&](double s) {
    double sum = 0.0;
    for (double r : residuals) sum += biweight_rho(r / s);
    return sum / static_cast<double>(n) - k;
  };
  double hi = max_abs;
  while (excess(hi) > 0.0) hi *= 2.0;
  double lo = hi / 2.0;
  while (excess(lo) <= 0.0 && lo > 1e-300) lo /= 2.0;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TrendFit s_estimator_trend(std::span<const double> y, const SEstimatorOptions& opts) {
  const std::size_t n = y.size();
  if (n < 5) throw DataError("S-estimator trend needs at least 5 points");
  for (double v : y) {
    if (is_missing(v)) throw DataError("S-estimator trend: series contains missing values");
  }
  const Line model = best_line(y, opts);
  const Line null_model = best_location(y);

  TrendFit fit;
  fit.method = TrendMethod::SEstimator;
  fit.slope = model.slope;
  fit.intercept = model.intercept;
  fit.scale = model.scale;
  if (null_model.scale > 0.0) {
    const double ratio = model.scale / null_model.scale;
    fit.r_squared = std::clamp(1.0 - ratio * ratio, 0.0, 1.0);
  }

  if (model.scale == 0.0) {
    fit.p_value = fit.slope == 0.0 ? 1.0 : 0.0;
  } else {
    const double dn = static_cast<double>(n);
    const double tbar = (dn + 1.0) / 2.0;
    double sxx = 0.0;
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i + 1);
      sxx += (t - tbar) * (t - tbar);
      const double u = (y[i] - model.intercept - model.slope * t) / model.scale;
      a += biweight_psi(u) * biweight_psi(u);
      b += biweight_dpsi(u);
    }
    a /= dn;
    b /= dn;
    if (b > 0.0) {
      const double se = model.scale * std::sqrt(a) / b / std::sqrt(sxx);
      fit.p_value = se > 0.0 ? std::clamp(std::erfc(std::abs(fit.slope / se) / std::sqrt(2.0)), 0.0, 1.0)
                             : (fit.slope == 0.0 ? 1.0 : 0.0);
    }
  }
  fit.significant_5pct = fit.p_value < 0.05;
  return fit;
}

}  // namespace sttrend
