#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sttrend {

/// Country/altitude stratum of a station.
enum class Group { UKH, UKL, IH, IL };

std::string_view to_string(Group g);
std::optional<Group> parse_group(std::string_view text);

struct StationMeta {
  std::string id;
  std::string name;
  Group group = Group::UKH;
  std::string region;
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude_m = 0.0;
  int cadence_min = 60;

  /// Throws DataError when coordinates, altitude or cadence are out of range.
  void validate() const;
};

/// Minutes since 1970-01-01T00:00Z.
using EpochMinutes = std::int64_t;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Raw readings laid out on a regular grid of `cadence_min` minutes. Rows
/// skipped in the source file and blank values both appear as missing slots.
class ObservationSeries {
 public:
  ObservationSeries(std::string station, int cadence_min, EpochMinutes start,
                    std::vector<double> values);

  const std::string& station() const { return station_; }
  int cadence_min() const { return cadence_min_; }
  EpochMinutes start() const { return start_; }
  EpochMinutes timestamp(std::size_t i) const {
    return start_ + static_cast<EpochMinutes>(i) * cadence_min_;
  }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::span<const double> values() const { return values_; }
  std::size_t present_count() const;

 private:
  std::string station_;
  int cadence_min_;
  EpochMinutes start_;
  std::vector<double> values_;
};

enum class Resolution { Monthly, Annual };

/// Calendar key of a regular series; month is 0 for annual keys.
struct Period {
  int year = 0;
  int month = 0;
  friend bool operator==(const Period&, const Period&) = default;
  friend auto operator<=>(const Period&, const Period&) = default;
};

/// Evenly indexed monthly or annual means. Missing values are NaN.
class RegularSeries {
 public:
  RegularSeries() = default;
  /// Keys are contiguous starting at `first`; throws DataError otherwise.
  RegularSeries(std::string station, Resolution resolution, Period first,
                std::vector<double> values, std::vector<double> coverage);

  const std::string& station() const { return station_; }
  Resolution resolution() const { return resolution_; }
  std::size_t size() const { return values_.size(); }
  Period first() const { return first_; }
  Period key(std::size_t i) const;
  std::span<const double> values() const { return values_; }
  std::span<const double> coverage() const { return coverage_; }
  double value(std::size_t i) const { return values_[i]; }
  bool missing(std::size_t i) const { return is_missing(values_[i]); }
  std::size_t missing_count() const;

  /// Index of `p`, if inside the series.
  std::optional<std::size_t> index_of(Period p) const;

  /// Keys with year in [start_year, end_year]. Throws DataError on empty overlap.
  RegularSeries window(int start_year, int end_year) const;

  /// Year-indexed values of calendar month `month` (1..12); monthly only.
  std::vector<double> month_values(int month) const;

 private:
  std::string station_;
  Resolution resolution_ = Resolution::Monthly;
  Period first_;
  std::vector<double> values_;
  std::vector<double> coverage_;
};

struct MissingnessSummary {
  std::string station;
  double pct_missing = 0.0;
  std::array<double, 12> per_month_pct{};
};

}  // namespace sttrend
