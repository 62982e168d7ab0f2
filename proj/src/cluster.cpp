#include "sttrend/cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sttrend/error.hpp"

namespace sttrend {

Dendrogram complete_linkage(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  Dendrogram tree;
  tree.n = n;
  if (n == 0) return tree;
  // Slot a holds the active cluster whose smallest member is point a.
  std::vector<double> prox(d.values().begin(), d.values().end());
  std::vector<bool> active(n, true);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), std::size_t{0});
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = n;
    std::size_t bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (active[b] && (prox[a * n + b] < best || ba == n)) {
          best = prox[a * n + b];
          ba = a;
          bb = b;
        }
      }
    }
    tree.merges.push_back({id[ba], id[bb], best});
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == ba || c == bb) continue;
      const double v = std::max(prox[ba * n + c], prox[bb * n + c]);
      prox[ba * n + c] = v;
      prox[c * n + ba] = v;
    }
    active[bb] = false;
    id[ba] = n + step;
  }
  return tree;
}

std::vector<int> Dendrogram::cut(std::size_t k) const {
  if (k < 1 || k > n) throw ConfigError("cluster count k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  // Union-find over points; node ids >= n map to a representative point.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> node_point(n + merges.size());
  std::iota(node_point.begin(), node_point.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  for (std::size_t s = 0; s < n - k; ++s) {
    const std::size_t a = find(node_point[merges[s].left]);
    const std::size_t b = find(node_point[merges[s].right]);
    parent[std::max(a, b)] = std::min(a, b);
    node_point[n + s] = std::min(a, b);
  }
  std::vector<int> label(n, -1);
  std::vector<int> assignment(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (label[r] < 0) label[r] = next++;
    assignment[i] = label[r];
  }
  return assignment;
}

SilhouetteResult silhouette(const DistanceMatrix& d, const std::vector<int>& assignment) {
  const std::size_t n = d.size();
  if (assignment.size() != n) throw DataError("silhouette: assignment does not cover the matrix labels");
  int clusters = 0;
  for (int c : assignment) {
    if (c < 0) throw DataError("silhouette: negative cluster index");
    clusters = std::max(clusters, c + 1);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(clusters), 0);
  for (int c : assignment) ++sizes[static_cast<std::size_t>(c)];
  const auto nonempty = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });

  SilhouetteResult r;
  r.per_point.assign(n, 0.0);
  if (nonempty >= 2) {
    std::vector<double> sums(sizes.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto own = static_cast<std::size_t>(assignment[i]);
      if (sizes[own] <= 1) continue;
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) sums[static_cast<std::size_t>(assignment[j])] += d(i, j);
      }
      const double a = sums[own] / static_cast<double>(sizes[own] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
      }
      const double denom = std::max(a, b);
      r.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
  }
  double total = 0.0;
  for (double s : r.per_point) total += s;
  r.mean = n ? total / static_cast<double>(n) : 0.0;
  return r;
}

ClusterSolution hcluster(const DistanceMatrix& d, std::size_t k) {
  if (k < 1 || k > d.size()) {
    throw ConfigError("cluster count k=" + std::to_string(k) + " outside [1, " + std::to_string(d.size()) + "]");
  }
  ClusterSolution sol;
  sol.labels = d.labels();
  sol.tree = complete_linkage(d);
  sol.k = k;
  sol.assignment = sol.tree.cut(k);
  SilhouetteResult s = silhouette(d, sol.assignment);
  sol.silhouette_per_point = std::move(s.per_point);
  sol.silhouette_mean = s.mean;
  return sol;
}

std::vector<KScore> select_k(const DistanceMatrix& d, std::size_t k_min, std::size_t k_max) {
  const std::size_t n = d.size();
  if (n < 3 || k_min < 2 || k_max > n - 1 || k_min > k_max) {
    throw ConfigError("k range [" + std::to_string(k_min) + ", " + std::to_string(k_max) +
                      "] must lie within [2, " + std::to_string(n >= 1 ? n - 1 : 0) + "]");
  }
  const Dendrogram tree = complete_linkage(d);
  std::vector<KScore> table;
  std::size_t best = 0;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    table.push_back({k, silhouette(d, tree.cut(k)).mean, false});
    if (table.back().mean_silhouette > table[best].mean_silhouette) best = table.size() - 1;
  }
  table[best].best = true;
  return table;
}

}  // namespace sttrend
