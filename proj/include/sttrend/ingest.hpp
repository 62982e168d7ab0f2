#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sttrend/series.hpp"

namespace sttrend {

/// Column mapping for a raw observation file.
struct Schema {
  std::string timestamp_column = "timestamp";
  std::string value_column = "value";
  /// Offset east of UTC applied to timestamps that carry no explicit offset.
  int utc_offset_min = 0;
  int cadence_min = 60;
};

struct ParseResult {
  ObservationSeries series;
  std::size_t parsed_rows = 0;
  /// Rows whose value field was present but not a number; stored as missing.
  std::size_t rejected_rows = 0;
};

/// Reads `timestamp,value` rows onto the cadence grid. Throws DataError on an
/// unreadable file, non-increasing timestamps or an off-grid timestamp.
ParseResult parse_observations(const std::filesystem::path& path, const Schema& schema,
                               const std::string& station);
ParseResult parse_observations(std::istream& in, const Schema& schema, const std::string& station);

/// Monthly windows with coverage below this fraction are marked missing.
inline constexpr double kMinMonthlyCoverage = 0.5;

/// Monthly means over calendar months (UTC) spanning the observations, or
/// annual means of the seasonally imputed monthly means for complete years.
RegularSeries aggregate(const ObservationSeries& obs, Resolution resolution);

/// Equal-weight mean of the 12 monthly values of every complete year. The
/// input must have no missing values; coverage is the mean monthly coverage.
RegularSeries annual_from_monthly(const RegularSeries& monthly);

/// Fills missing monthly values within each calendar-month sub-series by
/// linear interpolation, extending the nearest observed value at the edges.
/// Throws DataError naming the station and month when a sub-series is empty.
RegularSeries impute_seasonal(const RegularSeries& series);

MissingnessSummary missingness(const ObservationSeries& obs);

/// Corpus manifest `id,name,group,region,lat,lon,alt_m,cadence_min`.
std::vector<StationMeta> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<StationMeta>& stations);

/// `year,month,mean_c,coverage` (monthly) or `year,mean_c,coverage` (annual),
/// written at round-trip precision.
void write_series_csv(const std::filesystem::path& path, const RegularSeries& series);
RegularSeries read_series_csv(const std::filesystem::path& path, const std::string& station);

}  // namespace sttrend
