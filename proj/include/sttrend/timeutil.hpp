#pragma once

#include <string>
#include <string_view>

#include "sttrend/series.hpp"

namespace sttrend {

struct CivilTime {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
};

EpochMinutes to_epoch(const CivilTime& t);
CivilTime to_civil(EpochMinutes m);

/// Minutes from the start of (year, month) to the start of the next month.
EpochMinutes month_start(int year, int month);
int days_in_month(int year, int month);

/// Parses "UTC", "Z", "+HH:MM", "-HHMM" into an offset east of UTC in minutes.
int parse_utc_offset(std::string_view text);

/// ISO-8601 "YYYY-MM-DD[T| ]HH:MM[:SS][Z|+HH:MM]". Local times without an
/// explicit offset are shifted by `default_offset_min`. Throws DataError.
EpochMinutes parse_timestamp(std::string_view text, int default_offset_min);

/// "YYYY-MM-DDTHH:MMZ".
std::string format_timestamp(EpochMinutes m);

}  // namespace sttrend
