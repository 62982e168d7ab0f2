#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sttrend/series.hpp"

namespace sttrend {

/// One planted station group of a synthetic corpus.
struct GroupSpec {
  Group group = Group::UKH;
  /// Regions assigned round-robin to the group's stations; may be empty.
  std::vector<std::string> regions;
  int n_stations = 1;
  double annual_slope = 0.0;                // degC per year
  std::array<double, 12> seasonal_profile{};  // monthly climatology, degC
  /// Station-specific monthly anomaly sd.
  double noise_sd = 0.0;
  /// Group-shared monthly anomaly sd; anomalies are centred within each
  /// year so they leave the annual means untouched.
  double shared_sd = 0.0;
  /// Sd of a constant per-station offset.
  double offset_sd = 0.0;
  /// Peak-to-mean amplitude of the daily cycle and per-reading noise sd.
  double diurnal_amp = 0.0;
  double reading_sd = 0.0;
  double missing_pct = 0.0;
  int cadence_min = 60;
  double base_altitude_m = 100.0;
  double latitude = 45.0;
  double longitude = 7.0;
};

struct SyntheticSpec {
  std::vector<GroupSpec> groups;
  int start_year = 2002;
  int end_year = 2021;
  std::uint64_t seed = 42;

  /// Throws ConfigError on an invalid group or window.
  void validate() const;
};

/// Smooth seasonal cycle: mean - amplitude * cos(2 pi (month - 1 - peak_shift) / 12),
/// coldest around January for peak_shift = 0.
std::array<double, 12> seasonal_cycle(double mean, double amplitude, double peak_shift = 0.0);

/// Four groups of eight stations echoing UK/Italian highland/lowland climates.
SyntheticSpec default_synthetic_spec(std::uint64_t seed = 42);

/// Writes `<id>.csv` per station and `stations.csv` into `dir`. Station ids are
/// the group label plus a two-digit index (UKH01, ...).
std::vector<StationMeta> gen_corpus(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace sttrend
