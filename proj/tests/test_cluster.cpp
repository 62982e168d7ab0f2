#include "doctest.h"

#include <random>
#include <set>

#include "oracles.hpp"
#include "sttrend/cluster.hpp"
#include "sttrend/error.hpp"

using namespace sttrend;

namespace {

DistanceMatrix make(std::size_t n, const std::vector<double>& v) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  return DistanceMatrix(labels, v);
}

std::vector<double> random_matrix(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> u(1, levels);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = u(rng);
  }
  return v;
}

}  // namespace

TEST_CASE("cut at n and at one") {
  std::mt19937_64 rng(1);
  const auto d = make(5, random_matrix(rng, 5, 100));
  const auto all = hcluster(d, 5);
  CHECK(all.assignment == std::vector<int>{0, 1, 2, 3, 4});
  const auto one = hcluster(d, 1);
  CHECK(one.assignment == std::vector<int>(5, 0));
  CHECK(one.silhouette_mean == 0.0);
  CHECK_THROWS_AS(hcluster(d, 0), ConfigError);
  CHECK_THROWS_AS(hcluster(d, 6), ConfigError);
}

TEST_CASE("two separated triplets") {
  // Points 0, 2, 4 close together, 1, 3, 5 close together.
  std::vector<double> v(36, 0.0);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i != j) v[i * 6 + j] = (i % 2 == j % 2) ? 1.0 + 0.1 * static_cast<double>(i + j) : 10.0 + static_cast<double>(i * j) * 0.01;
    }
  }
  const auto d = make(6, v);
  const auto sol = hcluster(d, 2);
  CHECK(sol.assignment == std::vector<int>{0, 1, 0, 1, 0, 1});
  const auto oracle_labels = oracle::complete_linkage_all_k(v, 6);
  CHECK(sol.assignment == oracle_labels[2]);
}

TEST_CASE("complete linkage matches naive oracle at every k") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = size(rng);
    // Few distinct levels forces ties.
    const auto v = random_matrix(rng, n, rep % 2 ? 4 : 1000);
    const auto d = make(n, v);
    const auto expect = oracle::complete_linkage_all_k(v, n);
    const auto tree = complete_linkage(d);
    REQUIRE(tree.merges.size() == n - 1);
    for (std::size_t m = 1; m < tree.merges.size(); ++m) CHECK(tree.merges[m].height >= tree.merges[m - 1].height);
    for (std::size_t k = 1; k <= n; ++k) {
      CAPTURE(k);
      CHECK(tree.cut(k) == expect[k]);
      const auto sol = hcluster(d, k);
      CHECK(std::set<int>(sol.assignment.begin(), sol.assignment.end()).size() == k);
    }
  }
}

TEST_CASE("silhouette examples") {
  // Two clusters of two identical points each.
  const std::vector<double> v{0, 0, 3, 3, 0, 0, 3, 3, 3, 3, 0, 0, 3, 3, 0, 0};
  const auto s = silhouette(make(4, v), {0, 0, 1, 1});
  for (double x : s.per_point) CHECK(x == 1.0);
  CHECK(s.mean == 1.0);

  std::mt19937_64 rng(8);
  const auto r = random_matrix(rng, 5, 50);
  const auto single = silhouette(make(5, r), {0, 0, 1, 1, 2});
  CHECK(single.per_point[4] == 0.0);
  CHECK_THROWS(silhouette(make(5, r), {0, 0, 1}));
}

TEST_CASE("silhouette matches direct formula") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> lab(0, 2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto v = random_matrix(rng, 8, 1000);
    std::vector<int> assignment(8);
    for (std::size_t i = 0; i < 8; ++i) assignment[i] = static_cast<int>(i % 3);
    std::shuffle(assignment.begin(), assignment.end(), rng);
    const auto s = silhouette(make(8, v), assignment);
    const auto expect = oracle::silhouette_direct(v, assignment);
    double mean = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(s.per_point[i] - expect[i]) <= 1e-12);
      CHECK(s.per_point[i] >= -1.0);
      CHECK(s.per_point[i] <= 1.0);
      mean += expect[i] / 8.0;
    }
    CHECK(std::abs(s.mean - mean) <= 1e-12);
  }
}

TEST_CASE("select k recovers planted groups") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> jitter(0.0, 0.05);
  for (std::size_t groups : {2u, 4u}) {
    const std::size_t n = groups * 5;
    std::vector<double> centre(n), v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) centre[i] = static_cast<double>(i / 5) * 10.0 + jitter(rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) v[i * n + j] = std::abs(centre[i] - centre[j]);
    }
    const auto table = select_k(make(n, v), 2, 6);
    CHECK(table.size() == 5);
    std::size_t best = 0;
    for (const auto& row : table) {
      if (row.best) best = row.k;
    }
    CHECK(best == groups);
  }
  std::vector<double> tiny(16, 1.0);
  for (std::size_t i = 0; i < 4; ++i) tiny[i * 5] = 0.0;
  CHECK_THROWS_AS(select_k(make(4, tiny), 2, 4), ConfigError);
  CHECK_THROWS_AS(select_k(make(4, tiny), 1, 3), ConfigError);
}
