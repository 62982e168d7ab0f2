#include "sttrend/series.hpp"

#include <algorithm>

#include "sttrend/error.hpp"

namespace sttrend {

std::string_view to_string(Group g) {
  switch (g) {
    case Group::UKH: return "UKH";
    case Group::UKL: return "UKL";
    case Group::IH: return "IH";
    case Group::IL: return "IL";
  }
  return "?";
}

std::optional<Group> parse_group(std::string_view text) {
  for (Group g : {Group::UKH, Group::UKL, Group::IH, Group::IL}) {
    if (to_string(g) == text) return g;
  }
  return std::nullopt;
}

void StationMeta::validate() const {
  if (id.empty()) throw DataError("station with empty id");
  if (!(latitude >= -90.0 && latitude <= 90.0)) throw DataError("station " + id + ": latitude out of range");
  if (!(longitude >= -180.0 && longitude <= 180.0)) {
    throw DataError("station " + id + ": longitude out of range");
  }
  if (!(altitude_m >= 0.0)) throw DataError("station " + id + ": negative altitude");
  if (cadence_min != 30 && cadence_min != 60) {
    throw DataError("station " + id + ": cadence must be 30 or 60 minutes");
  }
}

ObservationSeries::ObservationSeries(std::string station, int cadence_min, EpochMinutes start,
                                     std::vector<double> values)
    : station_(std::move(station)), cadence_min_(cadence_min), start_(start), values_(std::move(values)) {
  if (cadence_min_ <= 0) throw DataError("non-positive cadence");
}

std::size_t ObservationSeries::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return !is_missing(v); }));
}

namespace {

Period advance(Period p, Resolution r, std::size_t steps) {
  if (r == Resolution::Annual) return {p.year + static_cast<int>(steps), 0};
  const long linear = static_cast<long>(p.year) * 12 + (p.month - 1) + static_cast<long>(steps);
  return {static_cast<int>(linear / 12), static_cast<int>(linear % 12) + 1};
}

}  // namespace

RegularSeries::RegularSeries(std::string station, Resolution resolution, Period first,
                             std::vector<double> values, std::vector<double> coverage)
    : station_(std::move(station)),
      resolution_(resolution),
      first_(first),
      values_(std::move(values)),
      coverage_(std::move(coverage)) {
  if (coverage_.size() != values_.size()) throw DataError("series " + station_ + ": coverage length mismatch");
  if (resolution_ == Resolution::Monthly && (first_.month < 1 || first_.month > 12)) {
    throw DataError("series " + station_ + ": invalid first month");
  }
  if (resolution_ == Resolution::Annual) first_.month = 0;
  for (double c : coverage_) {
    if (!(c >= 0.0 && c <= 1.0)) throw DataError("series " + station_ + ": coverage outside [0, 1]");
  }
}

Period RegularSeries::key(std::size_t i) const { return advance(first_, resolution_, i); }

std::size_t RegularSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return is_missing(v); }));
}

std::optional<std::size_t> RegularSeries::index_of(Period p) const {
  long offset = 0;
  if (resolution_ == Resolution::Annual) {
    offset = p.year - first_.year;
  } else {
    offset = (static_cast<long>(p.year) * 12 + p.month) - (static_cast<long>(first_.year) * 12 + first_.month);
  }
  if (offset < 0 || offset >= static_cast<long>(values_.size())) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

RegularSeries RegularSeries::window(int start_year, int end_year) const {
  std::vector<double> v;
  std::vector<double> c;
  std::optional<Period> first;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Period k = key(i);
    if (k.year < start_year || k.year > end_year) continue;
    if (!first) first = k;
    v.push_back(values_[i]);
    c.push_back(coverage_[i]);
  }
  if (!first) {
    throw DataError("series " + station_ + ": no data in window " + std::to_string(start_year) + "-" +
                    std::to_string(end_year));
  }
  return RegularSeries(station_, resolution_, *first, std::move(v), std::move(c));
}

std::vector<double> RegularSeries::month_values(int month) const {
  if (resolution_ != Resolution::Monthly) throw DataError("month_values on annual series " + station_);
  std::vector<double> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (key(i).month == month) out.push_back(values_[i]);
  }
  return out;
}

}  // namespace sttrend
