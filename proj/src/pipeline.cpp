#include "sttrend/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <tuple>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sttrend/cluster.hpp"
#include "sttrend/csv.hpp"
#include "sttrend/dcor.hpp"
#include "sttrend/error.hpp"
#include "sttrend/ingest.hpp"
#include "sttrend/parallel.hpp"
#include "sttrend/timeutil.hpp"
#include "sttrend/trend.hpp"

namespace sttrend {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---------------------------------------------------------------- config

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    const auto v = csv::parse_number(value);
    if (v) return *v;
  } catch (const DataError&) {
  }
  throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(value) + "'");
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view key, std::string_view value, char sep) {
  const auto pos = value.find(sep);
  if (pos == std::string_view::npos) {
    throw ConfigError("'" + std::string(key) + "' expects two values separated by '" + sep + "'");
  }
  return {trim(value.substr(0, pos)), trim(value.substr(pos + 1))};
}

}  // namespace

void PipelineConfig::validate() const {
  if (start_year > end_year) throw ConfigError("start_year must not exceed end_year");
  dtw.validate();
  if (k < 1) throw ConfigError("k must be at least 1");
  if (k_min < 2 || k_min > k_max) throw ConfigError("k_range must satisfy 2 <= k_min <= k_max");
  if (permutations < 99) throw ConfigError("permutations must be at least 99");
  if (baseline_start > baseline_end) throw ConfigError("baseline start must not exceed its end");
  parse_utc_offset(timezone);
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "corpus_dir") {
    corpus_dir = std::string(value);
  } else if (key == "manifest") {
    manifest = std::string(value);
  } else if (key == "out_dir" || key == "out") {
    out_dir = std::string(value);
  } else if (key == "start_year") {
    start_year = parse_integer<int>(key, value);
  } else if (key == "end_year") {
    end_year = parse_integer<int>(key, value);
  } else if (key == "window") {
    const auto [a, b] = split_pair(key, value, '-');
    start_year = parse_integer<int>(key, a);
    end_year = parse_integer<int>(key, b);
  } else if (key == "local_dist") {
    dtw.local_distance = parse_local_distance(value);
  } else if (key == "weights") {
    std::vector<double> w;
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const auto part = trim(value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      w.push_back(parse_real(key, part));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (w.size() != 3) throw ConfigError("weights expects wh,wv,wd");
    dtw.wh = w[0];
    dtw.wv = w[1];
    dtw.wd = w[2];
  } else if (key == "lambda") {
    dtw.lambda = parse_real(key, value);
  } else if (key == "k") {
    k = parse_integer<std::size_t>(key, value);
  } else if (key == "k_range") {
    const auto [a, b] = split_pair(key, value, value.find(':') != std::string_view::npos ? ':' : '-');
    k_min = parse_integer<std::size_t>(key, a);
    k_max = parse_integer<std::size_t>(key, b);
  } else if (key == "permutations") {
    permutations = parse_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "timezone") {
    timezone = std::string(value);
  } else if (key == "baseline") {
    const auto [a, b] = split_pair(key, value, '-');
    baseline_start = parse_integer<int>(key, a);
    baseline_end = parse_integer<int>(key, b);
  } else if (key == "threads") {
    threads = parse_integer<unsigned>(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  out << "corpus_dir = " << corpus_dir.generic_string() << '\n'
      << "manifest = " << manifest_path().generic_string() << '\n'
      << "window = " << start_year << '-' << end_year << '\n'
      << "local_dist = " << to_string(dtw.local_distance) << '\n'
      << "weights = " << csv::exact(dtw.wh) << ',' << csv::exact(dtw.wv) << ',' << csv::exact(dtw.wd) << '\n'
      << "lambda = " << csv::exact(dtw.lambda) << '\n'
      << "k = " << k << '\n'
      << "k_range = " << k_min << ':' << k_max << '\n'
      << "permutations = " << permutations << '\n'
      << "seed = " << seed << '\n'
      << "timezone = " << timezone << '\n'
      << "baseline = " << baseline_start << '-' << baseline_end << '\n';
  return out.str();
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key = value");
    }
    std::string_view value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      cfg.set(trim(s.substr(0, eq)), value);
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

PipelineConfig load_config(const fs::path& path) {
  PipelineConfig cfg;
  apply_config_file(cfg, path);
  return cfg;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// ---------------------------------------------------------------- anomaly

RegularSeries anomaly(const RegularSeries& series, int baseline_start, int baseline_end) {
  const bool monthly = series.resolution() == Resolution::Monthly;
  std::array<double, 13> sum{};
  std::array<int, 13> count{};
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Period p = series.key(i);
    if (p.year < baseline_start || p.year > baseline_end || series.missing(i)) continue;
    sum[static_cast<std::size_t>(p.month)] += series.value(i);
    ++count[static_cast<std::size_t>(p.month)];
  }
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto slot = static_cast<std::size_t>(series.key(i).month);
    if (count[slot] == 0) {
      throw DataError("series " + series.station() + ": baseline " + std::to_string(baseline_start) + "-" +
                      std::to_string(baseline_end) + " has no overlap" +
                      (monthly ? " for month " + std::to_string(slot) : std::string()));
    }
    out[i] = series.value(i) - sum[slot] / count[slot];
  }
  return RegularSeries(series.station(), series.resolution(), series.first(), std::move(out),
                       std::vector<double>(series.coverage().begin(), series.coverage().end()));
}

// ---------------------------------------------------------------- helpers

namespace {

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string two_digit(int m) {
  char buf[4];
  std::snprintf(buf, sizeof buf, "%02d", m);
  return buf;
}

std::string window_label(const PipelineConfig& cfg) {
  return std::to_string(cfg.start_year) + "-" + std::to_string(cfg.end_year);
}

fs::path series_path(const fs::path& ws, const std::string& id, const char* kind) {
  return ws / "series" / (id + "." + kind + ".csv");
}

std::string matrix_csv(const DistanceMatrix& d) {
  std::string out = "id";
  for (const auto& l : d.labels()) out += "," + csv::quote(l);
  out += '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += csv::quote(d.labels()[i]);
    for (std::size_t j = 0; j < d.size(); ++j) out += "," + csv::exact(d(i, j));
    out += '\n';
  }
  return out;
}

json matrix_json(const DistanceMatrix& d) {
  json rows = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < d.size(); ++j) row.push_back(d(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"labels", d.labels()}, {"values", std::move(rows)}};
}

struct Station {
  StationMeta meta;
  RegularSeries imputed;
  RegularSeries annual;
};

std::vector<StationMeta> load_manifest(const PipelineConfig& cfg) {
  auto stations = read_manifest(cfg.manifest_path());
  if (stations.empty()) throw DataError("manifest lists no stations");
  return stations;
}

std::vector<Station> load_imputed(const PipelineConfig& cfg, const fs::path& ws) {
  std::vector<Station> out;
  for (auto& meta : load_manifest(cfg)) {
    Station s;
    s.imputed = read_series_csv(series_path(ws, meta.id, "imputed"), meta.id);
    s.annual = read_series_csv(series_path(ws, meta.id, "annual"), meta.id);
    s.meta = std::move(meta);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> ids_of(const std::vector<Station>& stations) {
  std::vector<std::string> ids;
  for (const auto& s : stations) ids.push_back(s.meta.id);
  return ids;
}

// Year-indexed values of `month` for every station; all must share a length.
std::vector<std::vector<double>> month_sequences(const std::vector<Station>& stations, int month) {
  std::vector<std::vector<double>> seqs;
  for (const auto& s : stations) {
    seqs.push_back(s.imputed.month_values(month));
    if (seqs.back().size() != seqs.front().size()) {
      throw DataError("station " + s.meta.id + ": month " + std::to_string(month) + " has " +
                      std::to_string(seqs.back().size()) + " years, expected " + std::to_string(seqs.front().size()));
    }
  }
  return seqs;
}

// 12 monthly Sen slopes (degC per year) per station.
std::vector<std::vector<double>> slope_profiles(const std::vector<Station>& stations) {
  std::vector<std::vector<double>> out;
  for (const auto& s : stations) {
    std::vector<double> p;
    for (int m = 1; m <= 12; ++m) p.push_back(sens_slope(s.imputed.month_values(m)).slope);
    out.push_back(std::move(p));
  }
  return out;
}

// 12-point mean seasonal cycle per station.
std::vector<std::vector<double>> climatology_profiles(const std::vector<Station>& stations) {
  std::vector<std::vector<double>> out;
  for (const auto& s : stations) {
    std::vector<double> p;
    for (int m = 1; m <= 12; ++m) {
      const auto v = s.imputed.month_values(m);
      double sum = 0.0;
      for (double x : v) sum += x;
      p.push_back(sum / static_cast<double>(v.size()));
    }
    out.push_back(std::move(p));
  }
  return out;
}

json solution_json(const ClusterSolution& sol) {
  json assignment = json::object();
  json sil = json::object();
  for (std::size_t i = 0; i < sol.labels.size(); ++i) {
    assignment[sol.labels[i]] = sol.assignment[i] + 1;
    sil[sol.labels[i]] = sol.silhouette_per_point[i];
  }
  json merges = json::array();
  for (const auto& m : sol.tree.merges) merges.push_back(json::array({m.left, m.right, m.height}));
  return json{{"k", sol.k},
              {"assignment", std::move(assignment)},
              {"silhouette", std::move(sil)},
              {"mean_silhouette", sol.silhouette_mean},
              {"merges", std::move(merges)}};
}

// Rows `month,group,region,cluster,station_ids,mean_silhouette`.
void cluster_table_rows(std::string& out, const std::string& month, const std::vector<Station>& stations,
                        const ClusterSolution& sol) {
  std::map<std::tuple<int, std::string, int>, std::vector<std::string>> cells;
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto& m = stations[i].meta;
    cells[{static_cast<int>(m.group), m.region, sol.assignment[i] + 1}].push_back(m.id);
  }
  for (const auto& [key, ids] : cells) {
    std::string joined;
    for (const auto& id : ids) joined += (joined.empty() ? "" : ";") + id;
    out += csv::join({month, std::string(to_string(static_cast<Group>(std::get<0>(key)))), std::get<1>(key),
                      std::to_string(std::get<2>(key)), joined, csv::fixed(sol.silhouette_mean, 2)}) +
           '\n';
  }
}

const char* kClusterHeader = "month,group,region,cluster,station_ids,mean_silhouette\n";

std::string silhouette_header(const PipelineConfig& cfg) {
  std::string h = "month";
  for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k) h += ",k" + std::to_string(k);
  return h + ",best_k\n";
}

std::string silhouette_row(const std::string& label, const std::vector<KScore>& scores) {
  std::string row = label;
  std::size_t best = 0;
  for (const auto& s : scores) {
    row += "," + csv::fixed(s.mean_silhouette, 2);
    if (s.best) best = s.k;
  }
  return row + "," + std::to_string(best) + "\n";
}

// Mean silhouettes of each k averaged across months, best k flagged.
std::vector<KScore> average_scores(const std::vector<std::vector<KScore>>& per_month) {
  std::vector<KScore> avg = per_month.front();
  for (auto& s : avg) s.mean_silhouette = 0.0;
  for (const auto& month : per_month) {
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i].mean_silhouette += month[i].mean_silhouette;
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < avg.size(); ++i) {
    avg[i].mean_silhouette /= static_cast<double>(per_month.size());
    avg[i].best = false;
    if (avg[i].mean_silhouette > avg[best].mean_silhouette) best = i;
  }
  avg[best].best = true;
  return avg;
}

std::uint64_t station_seed(const PipelineConfig& cfg, const std::string& id) { return cfg.seed ^ fnv1a(id); }

}  // namespace

// ---------------------------------------------------------------- stages

void stage_ingest(const PipelineConfig& cfg, const fs::path& ws) {
  const auto stations = load_manifest(cfg);
  const int offset = parse_utc_offset(cfg.timezone);
  std::vector<std::string> rows(stations.size());
  fs::create_directories(ws / "series");
  parallel_for(stations.size(), cfg.threads, [&](std::size_t i) {
    const auto& meta = stations[i];
    Schema schema;
    schema.cadence_min = meta.cadence_min;
    schema.utc_offset_min = offset;
    const ParseResult parsed = parse_observations(cfg.corpus_dir / (meta.id + ".csv"), schema, meta.id);
    const RegularSeries monthly = aggregate(parsed.series, Resolution::Monthly);
    const MissingnessSummary miss = missingness(parsed.series);
    write_series_csv(series_path(ws, meta.id, "monthly"), monthly);
    std::string row = csv::join({meta.id, csv::fixed(miss.pct_missing, 2)});
    for (double p : miss.per_month_pct) row += "," + csv::fixed(p, 2);
    row += "," + std::to_string(parsed.parsed_rows) + "," + std::to_string(parsed.rejected_rows) + "\n";
    rows[i] = std::move(row);
  });
  std::string out = "station,pct_missing";
  for (int m = 1; m <= 12; ++m) out += ",m" + two_digit(m);
  out += ",parsed_rows,rejected_rows\n";
  for (const auto& r : rows) out += r;
  write_text(ws / "missingness.csv", out);
}

void stage_impute(const PipelineConfig& cfg, const fs::path& ws) {
  for (const auto& meta : load_manifest(cfg)) {
    const RegularSeries monthly = read_series_csv(series_path(ws, meta.id, "monthly"), meta.id)
                                      .window(cfg.start_year, cfg.end_year);
    const RegularSeries imputed = impute_seasonal(monthly);
    write_series_csv(series_path(ws, meta.id, "imputed"), imputed);
    write_series_csv(series_path(ws, meta.id, "annual"), annual_from_monthly(imputed));
  }
}

void stage_trends(const PipelineConfig& cfg, const fs::path& ws) {
  const auto stations = load_imputed(cfg, ws);
  std::vector<TrendReport> reports(stations.size());
  parallel_for(stations.size(), cfg.threads, [&](std::size_t i) {
    SEstimatorOptions opts;
    opts.seed = station_seed(cfg, stations[i].meta.id);
    reports[i] = trend_report(stations[i].annual, window_label(cfg), opts);
  });
  std::string table = trend_csv_header() + "\n";
  std::string md =
      "| Group | Region | Station | OLS slope | OLS R2 | S slope | S R2 | Sen slope | Sen R2 | MK p |\n"
      "|---|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < stations.size(); ++i) {
    const auto& r = reports[i];
    const auto& m = stations[i].meta;
    table += trend_csv_row(r) + "\n";
    md += "| " + std::string(to_string(m.group)) + " | " + m.region + " | " + m.id + " | " +
          csv::fixed(r.ols.slope, 4) + std::string(significance_stars(r.ols.p_value)) + " | " +
          csv::fixed(r.ols.r_squared, 2) + " | " + csv::fixed(r.s_estimator.slope, 4) +
          std::string(significance_stars(r.s_estimator.p_value)) + " | " + csv::fixed(r.s_estimator.r_squared, 2) +
          " | " + csv::fixed(r.sen.slope, 4) + std::string(significance_stars(r.sen.p_value)) + " | " +
          csv::fixed(r.sen.r_squared, 2) + " | " + csv::fixed(r.mk.p_value, 4) + " |\n";
  }
  write_text(ws / "annual_trends.csv", table);
  write_text(ws / "annual_trends.md", md);

  std::string monthly = "station,group,region,month,sen_slope,mk_p,significant\n";
  for (const auto& s : stations) {
    for (int m = 1; m <= 12; ++m) {
      const TrendFit fit = sens_slope(s.imputed.month_values(m));
      monthly += csv::join({s.meta.id, std::string(to_string(s.meta.group)), s.meta.region, std::to_string(m),
                            csv::fixed(fit.slope, 4), csv::fixed(fit.p_value, 4), fit.significant_5pct ? "1" : "0"}) +
                 "\n";
    }
  }
  write_text(ws / "monthly_sen_slopes.csv", monthly);
}

void stage_cluster(const PipelineConfig& cfg, const fs::path& ws) {
  const auto stations = load_imputed(cfg, ws);
  const auto ids = ids_of(stations);
  if (cfg.k > ids.size()) throw ConfigError("k exceeds the number of stations");
  if (cfg.k_max > ids.size() - 1) throw ConfigError("k_range exceeds the number of stations minus one");

  std::string sil_table = silhouette_header(cfg);
  std::string table = kClusterHeader;
  std::vector<std::vector<KScore>> per_month;
  for (int m = 1; m <= 12; ++m) {
    const DistanceMatrix d = distance_matrix(month_sequences(stations, m), ids, cfg.dtw, cfg.threads);
    write_text(ws / "dtw" / ("dtw_" + two_digit(m) + ".csv"), matrix_csv(d));
    per_month.push_back(select_k(d, cfg.k_min, cfg.k_max));
    sil_table += silhouette_row(two_digit(m), per_month.back());
    const ClusterSolution sol = hcluster(d, cfg.k);
    cluster_table_rows(table, two_digit(m), stations, sol);
    write_text(ws / "clusters" / ("month_" + two_digit(m) + ".json"), solution_json(sol).dump(2) + "\n");
  }
  sil_table += silhouette_row("mean", average_scores(per_month));
  write_text(ws / "silhouette_k.csv", sil_table);
  write_text(ws / "clusters_monthly.csv", table);

  const DistanceMatrix ds = distance_matrix(slope_profiles(stations), ids, cfg.dtw, cfg.threads);
  write_text(ws / "dtw" / "dtw_slopes.csv", matrix_csv(ds));
  const ClusterSolution slopes = hcluster(ds, cfg.k);
  std::string slope_table = kClusterHeader;
  cluster_table_rows(slope_table, "all", stations, slopes);
  write_text(ws / "clusters_slopes.csv", slope_table);
  write_text(ws / "clusters" / "slopes.json", solution_json(slopes).dump(2) + "\n");

  const DistanceMatrix dp = distance_matrix(climatology_profiles(stations), ids, cfg.dtw, cfg.threads);
  write_text(ws / "dtw" / "dtw_profile.csv", matrix_csv(dp));
  write_text(ws / "silhouette_k_profile.csv",
             silhouette_header(cfg) + silhouette_row("profile", select_k(dp, cfg.k_min, cfg.k_max)));
  const ClusterSolution profile = hcluster(dp, cfg.k);
  std::string profile_table = kClusterHeader;
  cluster_table_rows(profile_table, "profile", stations, profile);
  write_text(ws / "clusters_profile.csv", profile_table);
  write_text(ws / "clusters" / "profile.json", solution_json(profile).dump(2) + "\n");
}

void stage_dcor(const PipelineConfig& cfg, const fs::path& ws) {
  const auto stations = load_imputed(cfg, ws);
  const auto ids = ids_of(stations);
  json pvalues = json::object();
  std::string summary = "matrix,within_group_mean,between_group_mean\n";
  auto summarize = [&](const std::string& name, const DistanceMatrix& d) {
    double within = 0.0, between = 0.0;
    std::size_t nw = 0, nb = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        if (stations[i].meta.group == stations[j].meta.group) {
          within += d(i, j);
          ++nw;
        } else {
          between += d(i, j);
          ++nb;
        }
      }
    }
    summary += name + "," + csv::exact(nw ? within / static_cast<double>(nw) : 0.0) + "," +
               csv::exact(nb ? between / static_cast<double>(nb) : 0.0) + "\n";
  };
  for (int m = 1; m <= 12; ++m) {
    const auto seqs = month_sequences(stations, m);
    const DistanceMatrix d = dcor_matrix(seqs, ids, cfg.threads);
    write_text(ws / "dcor" / ("dcor_" + two_digit(m) + ".csv"), matrix_csv(d));
    summarize(two_digit(m), d);
    const std::uint64_t base = cfg.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(m));
    pvalues[two_digit(m)] = matrix_json(dcor_pvalue_matrix(seqs, ids, cfg.permutations, base, cfg.threads));
  }
  const DistanceMatrix slopes = dcor_matrix(slope_profiles(stations), ids, cfg.threads);
  write_text(ws / "dcor" / "dcor_slopes.csv", matrix_csv(slopes));
  summarize("slopes", slopes);

  std::vector<std::vector<double>> full;
  for (const auto& s : stations) full.emplace_back(s.imputed.values().begin(), s.imputed.values().end());
  const DistanceMatrix dfull = dcor_matrix(full, ids, cfg.threads);
  write_text(ws / "dcor" / "dcor_full.csv", matrix_csv(dfull));
  summarize("full", dfull);

  write_text(ws / "dcor" / "dcor_pvalues.json",
             json{{"permutations", cfg.permutations}, {"months", std::move(pvalues)}}.dump(1) + "\n");
  write_text(ws / "dcor_summary.csv", summary);
}

void stage_anomaly(const PipelineConfig& cfg, const fs::path& ws) {
  const auto stations = load_imputed(cfg, ws);
  std::string rows = "station,group,year,anomaly_c\n";
  std::map<int, std::vector<std::vector<double>>> by_group;
  for (const auto& s : stations) {
    const RegularSeries a = anomaly(s.annual, cfg.baseline_start, cfg.baseline_end);
    for (std::size_t i = 0; i < a.size(); ++i) {
      rows += csv::join({s.meta.id, std::string(to_string(s.meta.group)), std::to_string(a.key(i).year),
                         csv::fixed(a.value(i), 4)}) +
              "\n";
    }
    by_group[static_cast<int>(s.meta.group)].emplace_back(a.values().begin(), a.values().end());
  }
  write_text(ws / "annual_anomalies.csv", rows);

  std::string trends = "group,n_stations,ols_slope,ols_p,sen_slope,mk_p\n";
  for (const auto& [g, members] : by_group) {
    std::vector<double> mean(members.front().size(), 0.0);
    for (const auto& v : members) {
      if (v.size() != mean.size()) throw DataError("group anomaly series differ in length");
      for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i] / static_cast<double>(members.size());
    }
    const TrendFit ols = ols_trend(mean);
    const TrendFit sen = sens_slope(mean);
    trends += csv::join({std::string(to_string(static_cast<Group>(g))), std::to_string(members.size()),
                         csv::fixed(ols.slope, 4), csv::fixed(ols.p_value, 4), csv::fixed(sen.slope, 4),
                         csv::fixed(sen.p_value, 4)}) +
              "\n";
  }
  write_text(ws / "group_anomaly_trends.csv", trends);
}

void write_run_manifest(const PipelineConfig& cfg, const fs::path& ws) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(ws)) {
    if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  json hashes = json::object();
  for (const auto& f : files) hashes[fs::relative(f, ws).generic_string()] = hex64(fnv1a(read_text(f)));
  const std::string config = cfg.to_text();
  json manifest{{"config", config},
                {"config_hash", hex64(fnv1a(config))},
                {"seed", cfg.seed},
                {"files", std::move(hashes)}};
  write_text(ws / "run_manifest.json", manifest.dump(2) + "\n");
}

void run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.out_dir;
  const fs::path scratch = out.parent_path() / (out.filename().string() + ".partial");
  std::error_code ec;
  fs::remove_all(scratch, ec);
  fs::create_directories(scratch);
  auto staged = [&](const char* name, auto&& fn) {
    try {
      fn(cfg, scratch);
    } catch (const Error& e) {
      const std::string msg = std::string("stage '") + name + "': " + e.what();
      switch (e.category()) {
        case Error::Category::Config:
          throw ConfigError(msg);
        case Error::Category::Numerical:
          throw ConvergenceError(msg);
        default:
          throw DataError(msg);
      }
    } catch (const std::exception& e) {
      throw DataError(std::string("stage '") + name + "': " + e.what());
    }
  };
  try {
    staged("ingest", stage_ingest);
    staged("impute", stage_impute);
    staged("trends", stage_trends);
    staged("cluster", stage_cluster);
    staged("dcor", stage_dcor);
    staged("anomaly", stage_anomaly);
    staged("manifest", write_run_manifest);
    fs::remove_all(out);
    fs::rename(scratch, out);
  } catch (...) {
    fs::remove_all(scratch, ec);
    throw;
  }
}

}  // namespace sttrend
