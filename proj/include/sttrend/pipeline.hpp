#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sttrend/dtw.hpp"
#include "sttrend/series.hpp"

namespace sttrend {

struct PipelineConfig {
  std::filesystem::path corpus_dir = "corpus";
  /// Defaults to corpus_dir / "stations.csv" when empty.
  std::filesystem::path manifest;
  int start_year = 2002;
  int end_year = 2021;
  DtwConfig dtw;
  std::size_t k = 4;
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  std::size_t permutations = 199;
  std::uint64_t seed = 42;
  std::filesystem::path out_dir = "out";
  /// Timezone of raw timestamps lacking an explicit offset.
  std::string timezone = "UTC";
  int baseline_start = 1991;
  int baseline_end = 2020;
  unsigned threads = 0;

  std::filesystem::path manifest_path() const {
    return manifest.empty() ? corpus_dir / "stations.csv" : manifest;
  }

  /// Throws ConfigError on inconsistent values.
  void validate() const;

  /// Sets one `key = value` entry; throws ConfigError on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Canonical `key = value` lines for every setting, in a fixed order.
  std::string to_text() const;
};

/// Reads a flat `key = value` file; `#` starts a comment.
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Value minus the baseline-window mean. Annual series use a single mean;
/// monthly series use the baseline mean of each calendar month. Throws
/// DataError when the baseline does not overlap the series.
RegularSeries anomaly(const RegularSeries& series, int baseline_start, int baseline_end);

// Stages read and write inside a workspace directory:
//   series/<id>.monthly.csv   aggregated means (NA below coverage threshold)
//   series/<id>.imputed.csv   window-restricted, seasonally imputed
//   series/<id>.annual.csv    annual means of the imputed months
// Every stage re-reads its inputs from disk, so running them one by one gives
// the same bundle as run_pipeline.
void stage_ingest(const PipelineConfig& cfg, const std::filesystem::path& workspace);
void stage_impute(const PipelineConfig& cfg, const std::filesystem::path& workspace);
void stage_trends(const PipelineConfig& cfg, const std::filesystem::path& workspace);
void stage_cluster(const PipelineConfig& cfg, const std::filesystem::path& workspace);
void stage_dcor(const PipelineConfig& cfg, const std::filesystem::path& workspace);
void stage_anomaly(const PipelineConfig& cfg, const std::filesystem::path& workspace);

/// Every stage into a scratch directory that replaces cfg.out_dir on success.
/// On failure nothing is left behind and the error names the failing stage.
void run_pipeline(const PipelineConfig& cfg);

/// Writes run_manifest.json (config, config hash, seed, per-file FNV hashes).
void write_run_manifest(const PipelineConfig& cfg, const std::filesystem::path& workspace);

}  // namespace sttrend
