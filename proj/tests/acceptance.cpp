// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "shapiro_reference.hpp"
#include "sttrend/cluster.hpp"
#include "sttrend/csv.hpp"
#include "sttrend/dcor.hpp"
#include "sttrend/dtw.hpp"
#include "sttrend/ingest.hpp"
#include "sttrend/trend.hpp"

using namespace sttrend;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STTREND_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).generic_string()] = ss.str();
  }
  return files;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  while (auto row = reader.next()) rows.emplace_back(row->begin(), row->end());
  return rows;
}

// Shared workspace for the corpus-level criteria.
struct Workspace {
  fs::path root = fs::temp_directory_path() / "sttrend_acceptance";
  fs::path corpus = root / "corpus";
  Workspace() {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
};

Outcome dtw_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<int> val(-5, 5);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> x(len(rng)), y(len(rng));
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    for (double wd : {2.0, 1.0}) {
      DtwConfig cfg;
      cfg.wd = wd;
      cfg.lambda = 0.0;
      if (dtw_distance(x, y, cfg) != oracle::dtw_enumerate(x, y, 1.0, 1.0, wd, 0.0)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 comparisons"};
}

Outcome linkage_oracle() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::size_t mismatches = 0, cuts = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = size(rng);
    std::uniform_int_distribution<int> level(1, rep % 2 ? 5 : 10000);
    std::vector<double> v(n * n, 0.0);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("s" + std::to_string(i));
      for (std::size_t j = i + 1; j < n; ++j) v[i * n + j] = v[j * n + i] = level(rng);
    }
    const DistanceMatrix d(labels, v);
    const auto expect = oracle::complete_linkage_all_k(v, n);
    for (std::size_t k = 1; k <= n; ++k) {
      ++cuts;
      if (hcluster(d, k).assignment != expect[k]) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(cuts) + " cuts"};
}

Outcome mk_calibration() {
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> y(20);
    for (auto& v : y) v = nd(rng);
    if (mann_kendall(y).p_value < 0.05) ++rejections;
  }
  const double rate = rejections / 2000.0;
  return {rate >= 0.035 && rate <= 0.065, "rejection rate " + fmt("%.4f", rate)};
}

Outcome affine_exactness() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> slope(-1.0, 1.0), icpt(-20.0, 20.0);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const double b = slope(rng), a = icpt(rng);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = a + b * static_cast<double>(i + 1);
    for (double est : {ols_trend(y).slope, s_estimator_trend(y).slope, sens_slope(y).slope}) {
      worst = std::max(worst, std::abs(est - b));
    }
  }
  return {worst <= 1e-6, "max slope error " + fmt("%.3g", worst)};
}

Outcome s_robustness() {
  // Annual-mean noise sd 0.2 degC; six of twenty years shifted by +10 degC.
  std::vector<double> s_err, ols_err;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.2);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 10.0 + 0.06 * static_cast<double>(i + 1) + nd(rng);
    std::vector<std::size_t> idx(20);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t j = 0; j < 6; ++j) y[idx[j]] += 10.0;
    s_err.push_back(std::abs(s_estimator_trend(y).slope - 0.06));
    ols_err.push_back(std::abs(ols_trend(y).slope - 0.06));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[49] + v[50]);
  };
  const double ms = median(s_err), mo = median(ols_err);
  return {ms < 0.012 && mo > 0.03, "median error S " + fmt("%.4f", ms) + ", OLS " + fmt("%.4f", mo)};
}

Outcome shapiro_reference() {
  double dw = 0.0, dp = 0.0;
  for (const auto& ref : kShapiroReference) {
    const auto r = shapiro_wilk(ref.x);
    dw = std::max(dw, std::abs(r.w - ref.w));
    dp = std::max(dp, std::abs(r.p_value - ref.p));
  }
  return {dw <= 1e-3 && dp <= 2e-3, "max |dW| " + fmt("%.2e", dw) + ", max |dp| " + fmt("%.2e", dp)};
}

Outcome dcor_correctness() {
  const std::vector<double> two{0.0, 1.0};
  const auto hand = dcor(two, two);
  const bool hand_ok = hand.dcor == 1.0 && hand.dcov2 == 0.25;

  std::mt19937_64 rng(707);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(20), y(20);
    for (auto& v : x) v = nd(rng);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] + 2.0;
    worst = std::max(worst, std::abs(dcor(x, y).dcor - 1.0));
  }

  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    std::mt19937_64 gen(seed * 2 + 1);
    std::vector<double> x(20), y(20);
    for (auto& v : x) v = nd(gen);
    for (auto& v : y) v = nd(gen);
    if (dcor_test(x, y, 199, seed).p_value < 0.05) ++rejections;
  }
  const double rate = rejections / 500.0;
  return {hand_ok && worst <= 1e-9 && rate >= 0.03 && rate <= 0.07,
          std::string(hand_ok ? "hand case exact" : "hand case WRONG") + ", affine max |1-dcor| " +
              fmt("%.2e", worst) + ", null rejection " + fmt("%.3f", rate)};
}

Outcome planted_clusters(const Workspace& ws) {
  const fs::path out = ws.root / "bundle_a";
  if (run_cli("--out " + ws.corpus.string() + " gen-corpus") != 0) return {false, "gen-corpus failed"};
  if (run_cli("--out " + out.string() + " run-all --corpus " + ws.corpus.string()) != 0) {
    return {false, "run-all failed"};
  }

  const auto table = read_csv(out / "silhouette_k_profile.csv");
  const std::string best_k = table.at(1).back();

  std::ifstream pin(out / "clusters" / "profile.json");
  const auto profile = nlohmann::json::parse(pin);
  const double mean_sil = profile.at("mean_silhouette").get<double>();

  const auto stations = read_manifest(ws.corpus / "stations.csv");
  std::map<Group, std::set<int>> clusters_of_group;
  std::map<int, std::set<Group>> groups_of_cluster;
  for (const auto& s : stations) {
    const int c = profile.at("assignment").at(s.id).get<int>();
    clusters_of_group[s.group].insert(c);
    groups_of_cluster[c].insert(s.group);
  }
  bool recovered = clusters_of_group.size() == 4 && groups_of_cluster.size() == 4;
  for (const auto& [g, cs] : clusters_of_group) recovered = recovered && cs.size() == 1;

  const auto summary = read_csv(out / "dcor_summary.csv");
  int months_ok = 0;
  double within = 0.0, between = 0.0;
  for (const auto& row : summary) {
    if (row.at(0).size() != 2 || !std::isdigit(static_cast<unsigned char>(row[0][0]))) continue;
    const double w = std::stod(row.at(1)), b = std::stod(row.at(2));
    within += w / 12.0;
    between += b / 12.0;
    if (w > b) ++months_ok;
  }
  const bool pass = best_k == "4" && mean_sil >= 0.6 && recovered && months_ok == 12;
  return {pass, "argmax k " + best_k + ", mean silhouette " + fmt("%.3f", mean_sil) +
                    (recovered ? ", groups recovered" : ", groups NOT recovered") + ", dcor within " +
                    fmt("%.3f", within) + " vs between " + fmt("%.3f", between) + " (" + std::to_string(months_ok) +
                    "/12 months)"};
}

Outcome determinism(const Workspace& ws) {
  const fs::path a = ws.root / "det_a", b = ws.root / "det_b";
  for (const auto& out : {a, b}) {
    if (run_cli("--seed 42 --out " + out.string() + " run-all --corpus " + ws.corpus.string()) != 0) {
      return {false, "run-all failed"};
    }
  }
  const auto ta = read_tree(a), tb = read_tree(b);
  return {ta == tb && !ta.empty(), std::to_string(ta.size()) + " files, " + (ta == tb ? "identical" : "DIFFER")};
}

Outcome imputation_exactness() {
  std::mt19937_64 rng(1010);
  std::uniform_int_distribution<int> years_d(3, 25);
  std::uniform_real_distribution<double> a_d(-10.0, 25.0), b_d(-0.3, 0.3);
  std::bernoulli_distribution gap(0.35);
  double worst = 0.0;
  std::size_t altered = 0, gaps = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int years = years_d(rng);
    std::array<double, 12> a{}, b{};
    for (int m = 0; m < 12; ++m) {
      a[m] = a_d(rng);
      b[m] = b_d(rng);
    }
    std::vector<double> truth, values, cov;
    for (int y = 0; y < years; ++y) {
      for (int m = 0; m < 12; ++m) {
        truth.push_back(a[m] + b[m] * static_cast<double>(2000 + y));
        const bool drop = y > 0 && y < years - 1 && gap(rng);
        values.push_back(drop ? kMissing : truth.back());
        cov.push_back(drop ? 0.0 : 1.0);
        gaps += drop ? 1 : 0;
      }
    }
    const RegularSeries s("S", Resolution::Monthly, {2000, 1}, values, cov);
    const auto out = impute_seasonal(s);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!is_missing(values[i]) && out.value(i) != values[i]) ++altered;
      worst = std::max(worst, std::abs(out.value(i) - truth[i]));
    }
  }
  return {altered == 0 && worst <= 1e-9,
          std::to_string(gaps) + " gaps, max error " + fmt("%.2e", worst) + ", " + std::to_string(altered) +
              " observed values altered"};
}

}  // namespace

int main() {
  Workspace ws;
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "DTW equals exhaustive path enumeration", 10, dtw_oracle},
      {2, "complete linkage equals naive oracle", 10, linkage_oracle},
      {3, "Mann-Kendall null calibration", 30, mk_calibration},
      {4, "OLS, S and Sen exact on affine series", 0, affine_exactness},
      {5, "S-estimator robust to 30% outliers", 0, s_robustness},
      {6, "Shapiro-Wilk reference agreement", 0, shapiro_reference},
      {7, "distance correlation correctness", 60, dcor_correctness},
      {8, "planted cluster recovery", 120, [&] { return planted_clusters(ws); }},
      {9, "run-all determinism", 0, [&] { return determinism(ws); }},
      {10, "seasonal imputation exactness", 0, imputation_exactness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += ", over time limit";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
