#pragma once

// Independent reference implementations used only by the tests. They follow
// the textbook definitions directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace oracle {

// Minimum cost over every monotone warping path from (0,0) to (n-1,m-1).
// The first cell costs wd * C, each later step w_move * C(target), and every
// visited cell adds lambda * (i - j)^2.
inline double dtw_enumerate(const std::vector<double>& x, const std::vector<double>& y, double wh, double wv,
                            double wd, double lambda) {
  const long n = static_cast<long>(x.size());
  const long m = static_cast<long>(y.size());
  auto cost = [&](long i, long j) { return std::abs(x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(j)]); };
  auto pen = [&](long i, long j) { return lambda * static_cast<double>((i - j) * (i - j)); };
  double best = std::numeric_limits<double>::infinity();
  std::function<void(long, long, double)> walk = [&](long i, long j, double acc) {
    if (i == n - 1 && j == m - 1) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, acc + wh * cost(i + 1, j) + pen(i + 1, j));
    if (j + 1 < m) walk(i, j + 1, acc + wv * cost(i, j + 1) + pen(i, j + 1));
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc + wd * cost(i + 1, j + 1) + pen(i + 1, j + 1));
  };
  walk(0, 0, wd * cost(0, 0) + pen(0, 0));
  return best;
}

// Naive complete linkage: cluster proximity recomputed from scratch as the
// maximum member distance at every step. Ties go to the pair whose smallest
// members are lexicographically lowest. Returns the flat labelling for every
// k = n..1 (index k), clusters numbered by smallest member.
inline std::vector<std::vector<int>> complete_linkage_all_k(const std::vector<double>& d, std::size_t n) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i});
  auto labelling = [&] {
    std::vector<std::vector<std::size_t>> sorted = clusters;
    for (auto& c : sorted) std::sort(c.begin(), c.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<int> label(n);
    for (std::size_t c = 0; c < sorted.size(); ++c) {
      for (std::size_t p : sorted[c]) label[p] = static_cast<int>(c);
    }
    return label;
  };
  std::vector<std::vector<int>> by_k(n + 1);
  by_k[n] = labelling();
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = 0; b < clusters.size(); ++b) {
        if (a == b) continue;
        const std::size_t ma = *std::min_element(clusters[a].begin(), clusters[a].end());
        const std::size_t mb = *std::min_element(clusters[b].begin(), clusters[b].end());
        if (ma > mb) continue;
        double prox = -std::numeric_limits<double>::infinity();
        for (std::size_t p : clusters[a]) {
          for (std::size_t q : clusters[b]) prox = std::max(prox, d[p * n + q]);
        }
        const std::pair<std::size_t, std::size_t> key{ma, mb};
        if (prox < best || (prox == best && key < best_key)) {
          best = prox;
          best_key = key;
          ba = a;
          bb = b;
        }
      }
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    by_k[clusters.size()] = labelling();
  }
  return by_k;
}

// Silhouette straight from the definition with two explicit loops.
inline std::vector<double> silhouette_direct(const std::vector<double>& d, const std::vector<int>& label) {
  const std::size_t n = label.size();
  const int k = *std::max_element(label.begin(), label.end()) + 1;
  std::vector<double> s(n, 0.0);
  if (k < 2) return s;
  for (std::size_t i = 0; i < n; ++i) {
    double a_sum = 0.0;
    int a_count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && label[j] == label[i]) {
        a_sum += d[i * n + j];
        ++a_count;
      }
    }
    if (a_count == 0) continue;
    const double a = a_sum / a_count;
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == label[i]) continue;
      double sum = 0.0;
      int count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] == c) {
          sum += d[i * n + j];
          ++count;
        }
      }
      if (count) b = std::min(b, sum / count);
    }
    s[i] = (b - a) / std::max(a, b);
  }
  return s;
}

// Biweight rho with c = 1.547, normalised to sup 1.
inline double rho(double u) {
  const double c = 1.547;
  if (std::abs(u) >= c) return 1.0;
  const double x = u * u / (c * c);
  return x * (3.0 - 3.0 * x + x * x);
}

// E[rho(Z)] by composite Simpson on [-10, 10].
inline double rho_normal_mean() {
  const int steps = 200000;
  const double a = -10.0, b = 10.0, h = (b - a) / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = a + i * h;
    const double f = rho(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    sum += f * (i == 0 || i == steps ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

// Scale s with mean(rho(r / s)) = k, by plain bisection on [1e-12, 1e6].
inline double s_scale(const std::vector<double>& r, double k) {
  auto g = [&](double s) {
    double t = 0.0;
    for (double v : r) t += rho(v / s);
    return t / static_cast<double>(r.size()) - k;
  };
  double lo = 1e-12, hi = 1e6;
  if (g(lo) <= 0.0) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct GridFit {
  double slope;
  double intercept;
  double scale;
};

// Grid search of the S-scale over slope in [lo, hi] and intercept over the
// range of y - slope * t, refined once around the best cell.
inline GridFit s_grid(const std::vector<double>& y, double lo, double hi, double step) {
  const double k = rho_normal_mean();
  const std::size_t n = y.size();
  GridFit best{0, 0, std::numeric_limits<double>::infinity()};
  std::vector<double> r(n);
  auto eval = [&](double b, double a) {
    for (std::size_t i = 0; i < n; ++i) r[i] = y[i] - a - b * static_cast<double>(i + 1);
    const double s = s_scale(r, k);
    if (s < best.scale) best = {b, a, s};
  };
  for (double b = lo; b <= hi + 1e-12; b += step) {
    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    for (std::size_t i = 0; i < n; ++i) {
      const double off = y[i] - b * static_cast<double>(i + 1);
      mn = std::min(mn, off);
      mx = std::max(mx, off);
    }
    const double da = (mx - mn) / 200.0;
    for (int j = 0; j <= 200; ++j) eval(b, mn + j * da);
  }
  const GridFit coarse = best;
  const double span_a = 0.02 * (std::abs(coarse.intercept) + 1.0);
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) eval(coarse.slope + i * step / 20.0, coarse.intercept + j * span_a / 20.0);
  }
  return best;
}

// OLS slope/intercept from the 2x2 normal equations in raw sums.
inline std::pair<double, double> ols_normal_equations(const std::vector<double>& y) {
  double n = static_cast<double>(y.size()), st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    st += t;
    stt += t * t;
    sy += y[i];
    sty += t * y[i];
  }
  const double det = n * stt - st * st;
  return {(n * sty - st * sy) / det, (stt * sy - st * sty) / det};
}

}  // namespace oracle
