#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sttrend {

enum class LocalDistance { Manhattan, Euclidean };

std::string_view to_string(LocalDistance d);
LocalDistance parse_local_distance(std::string_view text);

/// Step weights and off-diagonal penalty of the regularized DTW recursion.
struct DtwConfig {
  LocalDistance local_distance = LocalDistance::Manhattan;
  double wh = 1.0;  // (i-1, j) -> (i, j)
  double wv = 1.0;  // (i, j-1) -> (i, j)
  double wd = 2.0;  // (i-1, j-1) -> (i, j)
  double lambda = 0.01;

  /// Throws ConfigError on negative weights, all-zero weights or lambda < 0.
  void validate() const;
};

/// Cumulative cost of the optimal warping path from (1,1) to (n,m). Entering
/// cell (i,j) costs the move weight times |x_i - y_j| plus lambda (i - j)^2.
/// Throws DataError on empty input.
double dtw_distance(std::span<const double> x, std::span<const double> y, const DtwConfig& cfg);

/// Labeled dense square matrix.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> values);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * labels_.size() + j]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

/// All pairwise distances. With wh != wv the two orientations are averaged so
/// the matrix stays symmetric and equivariant under reordering.
DistanceMatrix distance_matrix(const std::vector<std::vector<double>>& series,
                               const std::vector<std::string>& labels, const DtwConfig& cfg,
                               unsigned threads = 0);

}  // namespace sttrend
