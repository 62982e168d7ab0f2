#include "sttrend/corpus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "sttrend/error.hpp"
#include "sttrend/ingest.hpp"
#include "sttrend/timeutil.hpp"

namespace sttrend {

void SyntheticSpec::validate() const {
  if (start_year > end_year) throw ConfigError("synthetic corpus: start_year > end_year");
  if (groups.empty()) throw ConfigError("synthetic corpus: no groups");
  for (const auto& g : groups) {
    if (g.n_stations < 1) throw ConfigError("synthetic corpus: group needs at least one station");
    if (!(g.missing_pct >= 0.0 && g.missing_pct < 100.0)) {
      throw ConfigError("synthetic corpus: missing_pct must lie in [0, 100)");
    }
    if (g.noise_sd < 0 || g.shared_sd < 0 || g.offset_sd < 0 || g.reading_sd < 0) {
      throw ConfigError("synthetic corpus: negative standard deviation");
    }
    if (g.cadence_min != 30 && g.cadence_min != 60) throw ConfigError("synthetic corpus: cadence must be 30 or 60");
  }
}

std::array<double, 12> seasonal_cycle(double mean, double amplitude, double peak_shift) {
  std::array<double, 12> p{};
  for (int m = 0; m < 12; ++m) {
    p[static_cast<std::size_t>(m)] = mean - amplitude * std::cos(2.0 * M_PI * (m - peak_shift) / 12.0);
  }
  return p;
}

SyntheticSpec default_synthetic_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  auto group = [](Group g, std::vector<std::string> regions, double slope, std::array<double, 12> profile,
                  double noise, double missing, double alt, double lat, double lon) {
    GroupSpec s;
    s.group = g;
    s.regions = std::move(regions);
    s.n_stations = 8;
    s.annual_slope = slope;
    s.seasonal_profile = profile;
    s.noise_sd = noise;
    s.shared_sd = 0.8;
    s.offset_sd = 0.3;
    s.diurnal_amp = 3.0;
    s.reading_sd = 0.8;
    s.missing_pct = missing;
    s.cadence_min = 60;
    s.base_altitude_m = alt;
    s.latitude = lat;
    s.longitude = lon;
    return s;
  };
  spec.groups = {
      group(Group::UKH, {""}, -0.005, seasonal_cycle(2.0, 4.0, 0.5), 0.45, 8.0, 900.0, 56.8, -4.5),
      group(Group::UKL, {""}, -0.005, seasonal_cycle(9.0, 5.5, 0.5), 0.45, 3.0, 60.0, 55.9, -3.2),
      group(Group::IH, {"Piemonte", "Valle d'Aosta"}, 0.05, seasonal_cycle(3.0, 9.0), 0.3, 3.0, 1600.0, 45.7, 7.3),
      group(Group::IL, {"Piemonte", "Valle d'Aosta"}, 0.05, seasonal_cycle(12.5, 10.0), 0.3, 2.0, 400.0, 45.0, 7.6),
  };
  return spec;
}

namespace {

// Marks exactly round(pct% of n) slots missing in blocks of 1..72 slots.
std::vector<bool> missing_mask(std::size_t n, double pct, std::mt19937_64& rng) {
  std::vector<bool> mask(n, false);
  auto target = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(n)));
  target = std::min(target, n);
  std::uniform_int_distribution<std::size_t> start(0, n - 1);
  std::uniform_int_distribution<std::size_t> length(1, 72);
  std::size_t marked = 0;
  while (marked < target) {
    const std::size_t s = start(rng);
    const std::size_t len = length(rng);
    for (std::size_t i = s; i < std::min(n, s + len) && marked < target; ++i) {
      if (!mask[i]) {
        mask[i] = true;
        ++marked;
      }
    }
  }
  return mask;
}

void append_value(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  out.append(buf, res.ptr);
}

}  // namespace

std::vector<StationMeta> gen_corpus(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create corpus directory " + dir.string() + ": " + ec.message());

  std::mt19937_64 root(spec.seed);
  const int years = spec.end_year - spec.start_year + 1;
  std::vector<StationMeta> stations;
  std::normal_distribution<double> normal(0.0, 1.0);

  for (const auto& g : spec.groups) {
    // Group-shared monthly anomalies, centred within each year.
    std::vector<double> shared(static_cast<std::size_t>(years) * 12);
    for (int y = 0; y < years; ++y) {
      double mean = 0.0;
      for (int m = 0; m < 12; ++m) {
        const double v = g.shared_sd * normal(root);
        shared[static_cast<std::size_t>(y * 12 + m)] = v;
        mean += v / 12.0;
      }
      for (int m = 0; m < 12; ++m) shared[static_cast<std::size_t>(y * 12 + m)] -= mean;
    }
    for (int s = 0; s < g.n_stations; ++s) {
      StationMeta meta;
      char id[16];
      std::snprintf(id, sizeof id, "%s%02d", std::string(to_string(g.group)).c_str(), s + 1);
      meta.id = id;
      meta.name = "Synthetic " + std::string(to_string(g.group)) + " " + std::to_string(s + 1);
      meta.group = g.group;
      meta.region = g.regions.empty() ? "" : g.regions[static_cast<std::size_t>(s) % g.regions.size()];
      meta.latitude = g.latitude + 0.05 * s;
      meta.longitude = g.longitude + 0.07 * s;
      meta.altitude_m = g.base_altitude_m + 25.0 * s;
      meta.cadence_min = g.cadence_min;

      std::mt19937_64 rng(root());
      const double offset = g.offset_sd * normal(rng);
      std::vector<double> level(static_cast<std::size_t>(years) * 12);
      for (int y = 0; y < years; ++y) {
        for (int m = 0; m < 12; ++m) {
          const auto k = static_cast<std::size_t>(y * 12 + m);
          const double t = y + (m + 0.5) / 12.0;
          level[k] = g.seasonal_profile[static_cast<std::size_t>(m)] + g.annual_slope * t + shared[k] +
                     offset + g.noise_sd * normal(rng);
        }
      }

      const EpochMinutes start = month_start(spec.start_year, 1);
      const EpochMinutes end = month_start(spec.end_year + 1, 1);
      const auto n = static_cast<std::size_t>((end - start) / g.cadence_min);
      const std::vector<bool> mask = missing_mask(n, g.missing_pct, rng);

      std::string out;
      out.reserve(n * 30);
      out += "timestamp,value\n";
      int year = spec.start_year;
      int month = 1;
      EpochMinutes next_boundary = month_start(year, 2);
      for (std::size_t i = 0; i < n; ++i) {
        const EpochMinutes ts = start + static_cast<EpochMinutes>(i) * g.cadence_min;
        while (ts >= next_boundary) {
          if (++month == 13) {
            month = 1;
            ++year;
          }
          next_boundary = month == 12 ? month_start(year + 1, 1) : month_start(year, month + 1);
        }
        out += format_timestamp(ts);
        out += ',';
        if (!mask[i]) {
          const double minute_of_day = static_cast<double>(ts % 1440);
          const double diurnal = g.diurnal_amp * std::cos(2.0 * M_PI * (minute_of_day - 900.0) / 1440.0);
          const double noise = g.reading_sd > 0.0 ? g.reading_sd * normal(rng) : 0.0;
          append_value(out, level[static_cast<std::size_t>((year - spec.start_year) * 12 + month - 1)] + diurnal + noise);
        }
        out += '\n';
      }
      std::ofstream f(dir / (meta.id + ".csv"), std::ios::binary);
      if (!f) throw DataError("cannot write " + (dir / (meta.id + ".csv")).string());
      f.write(out.data(), static_cast<std::streamsize>(out.size()));
      stations.push_back(std::move(meta));
    }
  }
  write_manifest(dir / "stations.csv", stations);
  return stations;
}

}  // namespace sttrend
