#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sttrend/dtw.hpp"

namespace sttrend {

/// n samples of dimension `dim`, row-major.
class SampleMatrix {
 public:
  SampleMatrix(std::size_t n, std::size_t dim, std::vector<double> data);
  /// n one-dimensional samples.
  explicit SampleMatrix(std::span<const double> column);

  std::size_t rows() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<double> data_;
};

struct DcorResult {
  double dcov2 = 0.0;  // squared distance covariance (V-statistic)
  double dcov = 0.0;
  double dvar_x = 0.0;
  double dvar_y = 0.0;
  double dcor = 0.0;
  double p_value = 1.0;
  /// Set when dvar_x * dvar_y = 0; dcor is then reported as 0.
  bool degenerate = false;
};

/// Double-centered Euclidean distance matrix A_jk = a_jk - a_j. - a_.k + a_.. .
std::vector<double> double_centered_distances(const SampleMatrix& x);

DcorResult dcor(const SampleMatrix& x, const SampleMatrix& y);
DcorResult dcor(std::span<const double> x, std::span<const double> y);

/// Permutation test of independence: p = (1 + #{dcor_perm >= dcor_obs}) / (B + 1)
/// with y's sample order shuffled by a generator seeded with `seed`.
/// Throws ConfigError when permutations < 99.
DcorResult dcor_test(const SampleMatrix& x, const SampleMatrix& y, std::size_t permutations, std::uint64_t seed);
DcorResult dcor_test(std::span<const double> x, std::span<const double> y, std::size_t permutations,
                     std::uint64_t seed);

/// Symmetric matrix of pairwise dcor with unit diagonal. Throws DataError if
/// the sequences differ in length.
DistanceMatrix dcor_matrix(const std::vector<std::vector<double>>& series, const std::vector<std::string>& labels,
                           unsigned threads = 0);

/// Permutation p-values for every pair; pair (i, j), i < j, numbered in
/// row-major upper-triangle order p, uses seed base_seed ^ p. Diagonal is 0.
DistanceMatrix dcor_pvalue_matrix(const std::vector<std::vector<double>>& series,
                                  const std::vector<std::string>& labels, std::size_t permutations,
                                  std::uint64_t base_seed, unsigned threads = 0);

}  // namespace sttrend
