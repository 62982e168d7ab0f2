#include "sttrend/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sttrend/csv.hpp"
#include "sttrend/error.hpp"
#include "sttrend/timeutil.hpp"

namespace sttrend {

namespace {

EpochMinutes floor_div(EpochMinutes a, EpochMinutes b) {
  EpochMinutes q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

EpochMinutes ceil_div(EpochMinutes a, EpochMinutes b) { return -floor_div(-a, b); }

// Grid slots anchored at `anchor` with step `cadence` that fall in [lo, hi).
EpochMinutes slots_in(EpochMinutes anchor, int cadence, EpochMinutes lo, EpochMinutes hi) {
  return floor_div(hi - 1 - anchor, cadence) - ceil_div(lo - anchor, cadence) + 1;
}

Period next_month(Period p) { return p.month == 12 ? Period{p.year + 1, 1} : Period{p.year, p.month + 1}; }

}  // namespace

ParseResult parse_observations(const std::filesystem::path& path, const Schema& schema,
                               const std::string& station) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("station " + station + ": cannot read " + path.string());
  try {
    return parse_observations(in, schema, station);
  } catch (const DataError& e) {
    throw DataError(path.filename().string() + ": " + e.what());
  }
}

ParseResult parse_observations(std::istream& in, const Schema& schema, const std::string& station) {
  if (schema.cadence_min <= 0) throw ConfigError("cadence must be positive");
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("station " + station + ": empty file");
  const std::size_t ts_col = csv::column(*header, schema.timestamp_column);
  const std::size_t val_col = csv::column(*header, schema.value_column);

  std::vector<double> values;
  EpochMinutes start = 0;
  EpochMinutes last = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  while (auto rec = reader.next()) {
    if (rec->size() == 1 && (*rec)[0].empty()) continue;  // blank line
    if (rec->size() <= std::max(ts_col, val_col)) {
      throw DataError("line " + std::to_string(reader.line()) + ": too few fields");
    }
    EpochMinutes ts;
    try {
      ts = parse_timestamp((*rec)[ts_col], schema.utc_offset_min);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(reader.line()) + ": " + e.what());
    }
    double v = kMissing;
    try {
      if (auto parsed_value = csv::parse_number((*rec)[val_col])) v = *parsed_value;
    } catch (const DataError&) {
      ++rejected;
    }
    if (parsed == 0) {
      start = ts;
    } else {
      if (ts <= last) {
        throw DataError("line " + std::to_string(reader.line()) + ": non-monotonic timestamp " +
                        (*rec)[ts_col]);
      }
      if ((ts - start) % schema.cadence_min != 0) {
        throw DataError("line " + std::to_string(reader.line()) + ": timestamp " + (*rec)[ts_col] +
                        " is off the " + std::to_string(schema.cadence_min) + "-minute grid");
      }
    }
    const auto slot = static_cast<std::size_t>((ts - start) / schema.cadence_min);
    values.resize(slot + 1, kMissing);
    values[slot] = v;
    last = ts;
    ++parsed;
  }
  return {ObservationSeries(station, schema.cadence_min, start, std::move(values)), parsed, rejected};
}

namespace {

RegularSeries aggregate_monthly(const ObservationSeries& obs) {
  if (obs.empty()) throw DataError("station " + obs.station() + ": no observations to aggregate");
  const CivilTime first = to_civil(obs.timestamp(0));
  const CivilTime last = to_civil(obs.timestamp(obs.size() - 1));
  std::vector<double> means;
  std::vector<double> coverage;

  Period p{first.year, first.month};
  const Period end = next_month({last.year, last.month});
  std::size_t i = 0;
  const auto values = obs.values();
  while (p != end) {
    const EpochMinutes lo = month_start(p.year, p.month);
    const Period np = next_month(p);
    const EpochMinutes hi = month_start(np.year, np.month);
    double sum = 0.0;
    std::size_t present = 0;
    for (; i < values.size() && obs.timestamp(i) < hi; ++i) {
      if (!is_missing(values[i])) {
        sum += values[i];
        ++present;
      }
    }
    const auto expected = slots_in(obs.start(), obs.cadence_min(), lo, hi);
    const double cov = expected > 0 ? static_cast<double>(present) / static_cast<double>(expected) : 0.0;
    coverage.push_back(std::min(cov, 1.0));
    means.push_back(present > 0 && cov >= kMinMonthlyCoverage ? sum / static_cast<double>(present)
                                                               : kMissing);
    p = np;
  }
  return RegularSeries(obs.station(), Resolution::Monthly, {first.year, first.month}, std::move(means),
                       std::move(coverage));
}

}  // namespace

RegularSeries aggregate(const ObservationSeries& obs, Resolution resolution) {
  RegularSeries monthly = aggregate_monthly(obs);
  if (resolution == Resolution::Monthly) return monthly;
  return annual_from_monthly(impute_seasonal(monthly));
}

RegularSeries annual_from_monthly(const RegularSeries& monthly) {
  if (monthly.resolution() != Resolution::Monthly) {
    throw DataError("series " + monthly.station() + ": annual means need a monthly series");
  }
  std::vector<double> means;
  std::vector<double> coverage;
  std::optional<int> first_year;
  for (std::size_t i = 0; i < monthly.size(); ++i) {
    if (monthly.key(i).month != 1 || i + 12 > monthly.size()) continue;
    double sum = 0.0;
    double cov = 0.0;
    for (std::size_t j = i; j < i + 12; ++j) {
      if (monthly.missing(j)) {
        throw DataError("series " + monthly.station() + ": missing monthly value before annual averaging");
      }
      sum += monthly.value(j);
      cov += monthly.coverage()[j];
    }
    if (!first_year) first_year = monthly.key(i).year;
    means.push_back(sum / 12.0);
    coverage.push_back(cov / 12.0);
  }
  if (!first_year) throw DataError("series " + monthly.station() + ": no complete calendar year");
  return RegularSeries(monthly.station(), Resolution::Annual, {*first_year, 0}, std::move(means),
                       std::move(coverage));
}

RegularSeries impute_seasonal(const RegularSeries& series) {
  if (series.resolution() != Resolution::Monthly) {
    throw DataError("series " + series.station() + ": seasonal imputation needs monthly resolution");
  }
  std::vector<double> out(series.values().begin(), series.values().end());
  for (int month = 1; month <= 12; ++month) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series.key(i).month == month) idx.push_back(i);
    }
    std::vector<std::size_t> observed;  // positions within idx
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!series.missing(idx[k])) observed.push_back(k);
    }
    if (observed.size() == idx.size()) continue;
    if (observed.empty()) {
      throw DataError("station " + series.station() + ": calendar month " + std::to_string(month) +
                      " has no observed value; cannot impute");
    }
    std::size_t next = 0;  // first observed position >= k
    for (std::size_t k = 0; k < idx.size(); ++k) {
      while (next < observed.size() && observed[next] < k) ++next;
      if (next < observed.size() && observed[next] == k) continue;
      if (next == 0) {
        out[idx[k]] = out[idx[observed.front()]];
      } else if (next == observed.size()) {
        out[idx[k]] = out[idx[observed.back()]];
      } else {
        const std::size_t a = observed[next - 1];
        const std::size_t b = observed[next];
        const double ya = out[idx[a]];
        const double yb = out[idx[b]];
        const double frac = static_cast<double>(k - a) / static_cast<double>(b - a);
        out[idx[k]] = ya + (yb - ya) * frac;
      }
    }
  }
  return RegularSeries(series.station(), Resolution::Monthly, series.first(), std::move(out),
                       std::vector<double>(series.coverage().begin(), series.coverage().end()));
}

MissingnessSummary missingness(const ObservationSeries& obs) {
  MissingnessSummary summary;
  summary.station = obs.station();
  if (obs.empty()) return summary;
  std::array<std::size_t, 12> slots{};
  std::array<std::size_t, 12> absent{};
  std::size_t total_absent = 0;
  const auto values = obs.values();
  // Walk month boundaries instead of converting every timestamp.
  CivilTime t = to_civil(obs.timestamp(0));
  Period p{t.year, t.month};
  Period np = next_month(p);
  EpochMinutes boundary = month_start(np.year, np.month);
  for (std::size_t i = 0; i < values.size(); ++i) {
    while (obs.timestamp(i) >= boundary) {
      p = np;
      np = next_month(p);
      boundary = month_start(np.year, np.month);
    }
    ++slots[p.month - 1];
    if (is_missing(values[i])) {
      ++absent[p.month - 1];
      ++total_absent;
    }
  }
  summary.pct_missing = 100.0 * static_cast<double>(total_absent) / static_cast<double>(values.size());
  for (std::size_t m = 0; m < 12; ++m) {
    summary.per_month_pct[m] =
        slots[m] ? 100.0 * static_cast<double>(absent[m]) / static_cast<double>(slots[m]) : 0.0;
  }
  return summary;
}

std::vector<StationMeta> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read manifest " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty manifest " + path.string());
  const std::size_t c_id = csv::column(*header, "id");
  const std::size_t c_name = csv::column(*header, "name");
  const std::size_t c_group = csv::column(*header, "group");
  const std::size_t c_region = csv::column(*header, "region");
  const std::size_t c_lat = csv::column(*header, "lat");
  const std::size_t c_lon = csv::column(*header, "lon");
  const std::size_t c_alt = csv::column(*header, "alt_m");
  const std::size_t c_cad = csv::column(*header, "cadence_min");
  std::vector<StationMeta> stations;
  while (auto rec = reader.next()) {
    if (rec->size() == 1 && (*rec)[0].empty()) continue;
    if (rec->size() < header->size()) {
      throw DataError("manifest line " + std::to_string(reader.line()) + ": too few fields");
    }
    const auto& r = *rec;
    StationMeta s;
    s.id = r[c_id];
    s.name = r[c_name];
    const auto g = parse_group(r[c_group]);
    if (!g) throw DataError("manifest line " + std::to_string(reader.line()) + ": unknown group '" + r[c_group] + "'");
    s.group = *g;
    s.region = r[c_region];
    auto number = [&](std::size_t col) {
      const auto v = csv::parse_number(r[col]);
      if (!v) throw DataError("manifest line " + std::to_string(reader.line()) + ": empty " + (*header)[col]);
      return *v;
    };
    s.latitude = number(c_lat);
    s.longitude = number(c_lon);
    s.altitude_m = number(c_alt);
    s.cadence_min = static_cast<int>(number(c_cad));
    s.validate();
    for (const auto& other : stations) {
      if (other.id == s.id) throw DataError("manifest: duplicate station id " + s.id);
    }
    stations.push_back(std::move(s));
  }
  return stations;
}

void write_manifest(const std::filesystem::path& path, const std::vector<StationMeta>& stations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "id,name,group,region,lat,lon,alt_m,cadence_min\n";
  for (const auto& s : stations) {
    out << csv::join({s.id, s.name, std::string(to_string(s.group)), s.region, csv::exact(s.latitude),
                      csv::exact(s.longitude), csv::exact(s.altitude_m), std::to_string(s.cadence_min)})
        << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const RegularSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const bool monthly = series.resolution() == Resolution::Monthly;
  out << (monthly ? "year,month,mean_c,coverage\n" : "year,mean_c,coverage\n");
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Period k = series.key(i);
    out << k.year << ',';
    if (monthly) out << k.month << ',';
    out << csv::exact(series.value(i)) << ',' << csv::exact(series.coverage()[i]) << '\n';
  }
}

RegularSeries read_series_csv(const std::filesystem::path& path, const std::string& station) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw DataError("empty series file " + path.string());
  const bool monthly = std::find(header->begin(), header->end(), "month") != header->end();
  const std::size_t c_year = csv::column(*header, "year");
  const std::size_t c_month = monthly ? csv::column(*header, "month") : 0;
  const std::size_t c_mean = csv::column(*header, "mean_c");
  const std::size_t c_cov = csv::column(*header, "coverage");
  std::vector<double> values;
  std::vector<double> coverage;
  std::optional<Period> first;
  std::optional<Period> prev;
  while (auto rec = reader.next()) {
    if (rec->size() == 1 && (*rec)[0].empty()) continue;
    const auto& r = *rec;
    if (r.size() < header->size()) throw DataError(path.string() + ": short row");
    Period k{static_cast<int>(csv::parse_number(r[c_year]).value_or(0)),
             monthly ? static_cast<int>(csv::parse_number(r[c_month]).value_or(0)) : 0};
    if (prev) {
      const Period expect = monthly ? next_month(*prev) : Period{prev->year + 1, 0};
      if (k != expect) throw DataError(path.string() + ": keys are not contiguous");
    } else {
      first = k;
    }
    prev = k;
    values.push_back(csv::parse_number(r[c_mean]).value_or(kMissing));
    coverage.push_back(csv::parse_number(r[c_cov]).value_or(0.0));
  }
  if (!first) throw DataError(path.string() + ": no rows");
  return RegularSeries(station, monthly ? Resolution::Monthly : Resolution::Annual, *first,
                       std::move(values), std::move(coverage));
}

}  // namespace sttrend
