#pragma once

#include <cstddef>
#include <vector>

#include "sttrend/dtw.hpp"

namespace sttrend {

/// One agglomeration step. Ids below n are points; id n + s is the cluster
/// created by step s.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
};

/// Complete-linkage merge sequence of all n points (n - 1 merges).
struct Dendrogram {
  std::size_t n = 0;
  std::vector<Merge> merges;

  /// Flat clusters after applying the first n - k merges. Clusters are
  /// numbered 0..k-1 in order of their smallest member.
  std::vector<int> cut(std::size_t k) const;
};

struct SilhouetteResult {
  std::vector<double> per_point;
  double mean = 0.0;
};

struct ClusterSolution {
  std::vector<std::string> labels;
  Dendrogram tree;
  std::size_t k = 0;
  std::vector<int> assignment;
  std::vector<double> silhouette_per_point;
  double silhouette_mean = 0.0;
};

/// Agglomerative complete linkage. Among equally close cluster pairs the one
/// whose smallest member indices are lexicographically lowest merges first.
Dendrogram complete_linkage(const DistanceMatrix& d);

/// complete_linkage + cut at k + silhouette. Throws ConfigError unless 1 <= k <= n.
ClusterSolution hcluster(const DistanceMatrix& d, std::size_t k);

/// Per-point silhouette (b - a) / max(a, b); 0 for singletons or when only
/// one cluster exists. Throws DataError if the assignment size differs.
SilhouetteResult silhouette(const DistanceMatrix& d, const std::vector<int>& assignment);

struct KScore {
  std::size_t k = 0;
  double mean_silhouette = 0.0;
  bool best = false;
};

/// Mean silhouette for each k in [k_min, k_max]; the highest is flagged
/// (smallest k on ties).
std::vector<KScore> select_k(const DistanceMatrix& d, std::size_t k_min, std::size_t k_max);

}  // namespace sttrend
