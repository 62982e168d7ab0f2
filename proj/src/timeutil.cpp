#include "sttrend/timeutil.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "sttrend/error.hpp"

namespace sttrend {

namespace chr = std::chrono;

EpochMinutes to_epoch(const CivilTime& t) {
  const chr::year_month_day ymd{chr::year{t.year}, chr::month{static_cast<unsigned>(t.month)},
                                chr::day{static_cast<unsigned>(t.day)}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  const auto days = chr::sys_days{ymd}.time_since_epoch().count();
  return static_cast<EpochMinutes>(days) * 1440 + t.hour * 60 + t.minute;
}

CivilTime to_civil(EpochMinutes m) {
  EpochMinutes days = m / 1440;
  EpochMinutes rem = m % 1440;
  if (rem < 0) {
    rem += 1440;
    --days;
  }
  const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(rem / 60),
          static_cast<int>(rem % 60)};
}

EpochMinutes month_start(int year, int month) { return to_epoch({year, month, 1, 0, 0}); }

int days_in_month(int year, int month) {
  const chr::year_month_day_last last{chr::year{year},
                                      chr::month_day_last{chr::month{static_cast<unsigned>(month)}}};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t count, std::string_view whole) {
  if (pos + count > s.size()) throw DataError("truncated timestamp '" + std::string(whole) + "'");
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') throw DataError("malformed timestamp '" + std::string(whole) + "'");
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

// Offset suffix without the sign: "HH:MM", "HHMM" or "HH".
int offset_body(std::string_view s, std::string_view whole) {
  if (s.size() == 2) return digits(s, 0, 2, whole) * 60;
  if (s.size() == 4) return digits(s, 0, 2, whole) * 60 + digits(s, 2, 2, whole);
  if (s.size() == 5 && s[2] == ':') return digits(s, 0, 2, whole) * 60 + digits(s, 3, 2, whole);
  throw DataError("malformed UTC offset '" + std::string(whole) + "'");
}

}  // namespace

int parse_utc_offset(std::string_view text) {
  if (text == "UTC" || text == "Z" || text == "GMT" || text.empty()) return 0;
  std::string_view body = text;
  if (body.starts_with("UTC") || body.starts_with("GMT")) body.remove_prefix(3);
  if (body.empty() || (body[0] != '+' && body[0] != '-')) {
    throw ConfigError("unsupported timezone '" + std::string(text) + "' (use UTC or +HH:MM)");
  }
  const int sign = body[0] == '-' ? -1 : 1;
  try {
    return sign * offset_body(body.substr(1), text);
  } catch (const DataError&) {
    throw ConfigError("unsupported timezone '" + std::string(text) + "'");
  }
}

EpochMinutes parse_timestamp(std::string_view text, int default_offset_min) {
  const std::string_view whole = text;
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':') {
    throw DataError("malformed timestamp '" + std::string(whole) + "'");
  }
  CivilTime t{digits(text, 0, 4, whole), digits(text, 5, 2, whole), digits(text, 8, 2, whole),
              digits(text, 11, 2, whole), digits(text, 14, 2, whole)};
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (digits(text, pos + 1, 2, whole) != 0) {
      throw DataError("timestamp '" + std::string(whole) + "' is not on a whole minute");
    }
    pos += 3;
  }
  int offset = default_offset_min;
  if (pos < text.size()) {
    const std::string_view suffix = text.substr(pos);
    if (suffix == "Z") {
      offset = 0;
    } else if (suffix[0] == '+' || suffix[0] == '-') {
      offset = (suffix[0] == '-' ? -1 : 1) * offset_body(suffix.substr(1), whole);
    } else {
      throw DataError("malformed timestamp '" + std::string(whole) + "'");
    }
  }
  if (t.month < 1 || t.month > 12 || t.hour > 23 || t.minute > 59) {
    throw DataError("timestamp out of range '" + std::string(whole) + "'");
  }
  return to_epoch(t) - offset;
}

std::string format_timestamp(EpochMinutes m) {
  const CivilTime t = to_civil(m);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02dZ", t.year, t.month, t.day, t.hour,
                t.minute);
  return buf;
}

}  // namespace sttrend
