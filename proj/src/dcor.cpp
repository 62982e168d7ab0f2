#include "sttrend/dcor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sttrend/error.hpp"
#include "sttrend/parallel.hpp"

namespace sttrend {

SampleMatrix::SampleMatrix(std::size_t n, std::size_t dim, std::vector<double> data)
    : n_(n), dim_(dim), data_(std::move(data)) {
  if (dim_ == 0 || data_.size() != n_ * dim_) throw DataError("sample matrix shape mismatch");
}

SampleMatrix::SampleMatrix(std::span<const double> column)
    : n_(column.size()), dim_(1), data_(column.begin(), column.end()) {}

std::vector<double> double_centered_distances(const SampleMatrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const auto xj = x.row(j);
      const auto xk = x.row(k);
      double ss = 0.0;
      for (std::size_t d = 0; d < x.dim(); ++d) ss += (xj[d] - xk[d]) * (xj[d] - xk[d]);
      a[j * n + k] = a[k * n + j] = std::sqrt(ss);
    }
  }
  // The distance matrix is symmetric, so row and column means coincide.
  std::vector<double> mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) mean[j] += a[j * n + k];
    grand += mean[j];
    mean[j] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) a[j * n + k] += grand - mean[j] - mean[k];
  }
  return a;
}

namespace {

void check_pair(const SampleMatrix& x, const SampleMatrix& y) {
  if (x.rows() != y.rows()) throw DataError("dcor: sample counts differ");
  if (x.rows() < 2) throw DataError("dcor: needs at least 2 samples");
}

double mean_product(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s / static_cast<double>(a.size());
}

// Negative values only arise from cancellation; the V-statistics are >= 0.
double guarded(double v) { return std::max(v, 0.0); }

DcorResult finish(double dcov2, double dvar2_x, double dvar2_y) {
  DcorResult r;
  r.dcov2 = guarded(dcov2);
  dvar2_x = guarded(dvar2_x);
  dvar2_y = guarded(dvar2_y);
  r.dcov = std::sqrt(r.dcov2);
  r.dvar_x = std::sqrt(dvar2_x);
  r.dvar_y = std::sqrt(dvar2_y);
  const double denom = std::sqrt(dvar2_x * dvar2_y);
  if (!(denom > 0.0)) {
    r.degenerate = true;
    r.dcor = 0.0;
    return r;
  }
  r.dcor = std::clamp(std::sqrt(r.dcov2 / denom), 0.0, 1.0);
  return r;
}

}  // namespace

DcorResult dcor(const SampleMatrix& x, const SampleMatrix& y) {
  check_pair(x, y);
  const auto a = double_centered_distances(x);
  const auto b = double_centered_distances(y);
  return finish(mean_product(a, b), mean_product(a, a), mean_product(b, b));
}

DcorResult dcor(std::span<const double> x, std::span<const double> y) {
  return dcor(SampleMatrix(x), SampleMatrix(y));
}

DcorResult dcor_test(const SampleMatrix& x, const SampleMatrix& y, std::size_t permutations, std::uint64_t seed) {
  if (permutations < 99) throw ConfigError("dcor test needs at least 99 permutations");
  check_pair(x, y);
  const std::size_t n = x.rows();
  const auto a = double_centered_distances(x);
  const auto b = double_centered_distances(y);
  const double dvar2_x = mean_product(a, a);
  const double dvar2_y = mean_product(b, b);
  DcorResult observed = finish(mean_product(a, b), dvar2_x, dvar2_y);
  if (observed.degenerate) {
    observed.p_value = 1.0;
    return observed;
  }
  // Relabelling y permutes rows and columns of its centered matrix, which
  // leaves dvar(y) unchanged, so only the cross term is recomputed.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::size_t at_least = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double* arow = &a[j * n];
      const double* brow = &b[perm[j] * n];
      for (std::size_t k = 0; k < n; ++k) s += arow[k] * brow[perm[k]];
    }
    const DcorResult r = finish(s / static_cast<double>(n * n), dvar2_x, dvar2_y);
    if (r.dcor >= observed.dcor) ++at_least;
  }
  observed.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  return observed;
}

DcorResult dcor_test(std::span<const double> x, std::span<const double> y, std::size_t permutations,
                     std::uint64_t seed) {
  return dcor_test(SampleMatrix(x), SampleMatrix(y), permutations, seed);
}

namespace {

template <typename PairFn>
DistanceMatrix pairwise(const std::vector<std::vector<double>>& series, const std::vector<std::string>& labels,
                        double diagonal, unsigned threads, PairFn&& fn) {
  const std::size_t n = series.size();
  if (labels.size() != n) throw DataError("dcor matrix: label count mismatch");
  for (const auto& s : series) {
    if (s.size() != series.front().size()) throw DataError("dcor matrix: sequences differ in length");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = diagonal;
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double v = fn(p, series[i], series[j]);
    values[i * n + j] = v;
    values[j * n + i] = v;
  });
  return DistanceMatrix(labels, std::move(values));
}

}  // namespace

DistanceMatrix dcor_matrix(const std::vector<std::vector<double>>& series, const std::vector<std::string>& labels,
                           unsigned threads) {
  return pairwise(series, labels, 1.0, threads,
                  [](std::size_t, const std::vector<double>& x, const std::vector<double>& y) {
                    return dcor(x, y).dcor;
                  });
}

DistanceMatrix dcor_pvalue_matrix(const std::vector<std::vector<double>>& series,
                                  const std::vector<std::string>& labels, std::size_t permutations,
                                  std::uint64_t base_seed, unsigned threads) {
  return pairwise(series, labels, 0.0, threads,
                  [&](std::size_t p, const std::vector<double>& x, const std::vector<double>& y) {
                    return dcor_test(x, y, permutations, base_seed ^ static_cast<std::uint64_t>(p)).p_value;
                  });
}

}  // namespace sttrend
