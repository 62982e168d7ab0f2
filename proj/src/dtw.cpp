#include "sttrend/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sttrend/error.hpp"
#include "sttrend/parallel.hpp"

namespace sttrend {

std::string_view to_string(LocalDistance d) {
  return d == LocalDistance::Manhattan ? "manhattan" : "euclidean";
}

LocalDistance parse_local_distance(std::string_view text) {
  if (text == "manhattan") return LocalDistance::Manhattan;
  if (text == "euclidean") return LocalDistance::Euclidean;
  throw ConfigError("unknown local distance '" + std::string(text) + "'");
}

void DtwConfig::validate() const {
  if (!(wh >= 0.0 && wv >= 0.0 && wd >= 0.0)) throw ConfigError("DTW weights must be non-negative");
  if (wh == 0.0 && wv == 0.0 && wd == 0.0) throw ConfigError("at least one DTW weight must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("DTW lambda must be non-negative");
}

double dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg) {
  if (x.empty() || y.empty()) throw DataError("DTW distance of an empty sequence");
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Row-major (n+1) x (m+1) cumulative matrix; row/column 0 is the border.
  std::vector<double> acc((n + 1) * (m + 1), inf);
  const std::size_t stride = m + 1;
  acc[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    double* row = &acc[i * stride];
    const double* up = &acc[(i - 1) * stride];
    for (std::size_t j = 1; j <= m; ++j) {
      // |a - b| equals sqrt((a - b)^2) in one dimension; both local distances
      // coincide for scalar sequences.
      const double cost = std::abs(x[i - 1] - y[j - 1]);
      const double di = static_cast<double>(i) - static_cast<double>(j);
      const double best = std::min({up[j] + cfg.wh * cost, row[j - 1] + cfg.wv * cost, up[j - 1] + cfg.wd * cost});
      row[j] = best + cfg.lambda * di * di;
    }
  }
  return acc.back();
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  if (values_.size() != labels_.size() * labels_.size()) throw DataError("distance matrix shape mismatch");
}

DistanceMatrix distance_matrix(const std::vector<std::vector<double>>& series,
                               const std::vector<std::string>& labels, const DtwConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = series.size();
  if (n < 2) throw DataError("distance matrix needs at least 2 sequences");
  if (labels.size() != n) throw DataError("distance matrix: label count mismatch");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(n * n, 0.0);
  const bool symmetric_weights = cfg.wh == cfg.wv;
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    double d = dtw_distance(series[i], series[j], cfg);
    if (!symmetric_weights) d = 0.5 * (d + dtw_distance(series[j], series[i], cfg));
    values[i * n + j] = d;
    values[j * n + i] = d;
  });
  return DistanceMatrix(labels, std::move(values));
}

}  // namespace sttrend
