/**
 * @file report.cpp
 * @brief Contour banding, radar aggregation, cluster tables and the synthetic generator.
 */
#include "diurnal/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "diurnal/error.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {

CellBands bin_cell(double slope, double p_value) {
  require(std::isfinite(slope) && std::isfinite(p_value), "bin_cell: non-finite input");
  const double s = std::clamp(slope, -1.0, 1.0);
  const double p = std::clamp(p_value, 0.0, 1.0);
  CellBands bands;
  if (s <= -0.03) {
    bands.slope_band = 0;
  } else if (s <= 0.0) {
    bands.slope_band = 1;
  } else if (s <= 0.03) {
    bands.slope_band = 2;
  } else {
    bands.slope_band = 3;
  }
  if (p <= 0.05) {
    bands.p_band = 0;
  } else if (p <= 0.10) {
    bands.p_band = 1;
  } else {
    bands.p_band = 2;
  }
  return bands;
}

ContourGrid contour_grid(const TrendSurface& surface) {
  ContourGrid grid;
  grid.station_id = surface.station_id;
  grid.scale = surface.calendar.scale();
  for (const auto& w : surface.calendar.windows()) {
    grid.window_labels.push_back(w.label);
  }
  grid.cells.reserve(surface.cells.size());
  for (const auto& c : surface.cells) {
    ContourCell cell{c.window, c.hour, c.present(), 0.0, 0.0, {}};
    if (c.present()) {
      cell.sen_slope = c.sen.slope;
      cell.p_value = c.mk.p_value;
      cell.bands = bin_cell(cell.sen_slope, cell.p_value);
    }
    grid.cells.push_back(cell);
  }
  return grid;
}

void write_contour_header(std::ostream& out) {
  out << "station_id,scale,window_label,hour,sen_slope,p_value,slope_band,p_band\n";
}

void write_contour(std::ostream& out, const ContourGrid& grid) {
  const std::string id = io::csv_field(grid.station_id);
  for (const auto& c : grid.cells) {
    out << id << ',' << to_string(grid.scale) << ',' << grid.window_labels.at(c.window) << ',' << c.hour << ',';
    if (c.present) {
      out << io::format_double(c.sen_slope) << ',' << io::format_double(c.p_value) << ','
          << io::csv_field(kSlopeBandLabels[static_cast<std::size_t>(c.bands.slope_band)]) << ','
          << io::csv_field(kPBandLabels[static_cast<std::size_t>(c.bands.p_band)]);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

std::string_view to_string(RadarRegion region) {
  switch (region) {
    case RadarRegion::UKH: return "UKH";
    case RadarRegion::UKL: return "UKL";
    case RadarRegion::IL_AV: return "IL_AV";
    case RadarRegion::IL_P: return "IL_P";
    case RadarRegion::IH_AV: return "IH_AV";
    case RadarRegion::IH_P: return "IH_P";
  }
  return "?";
}

RadarRegion radar_region(const StationMeta& meta) {
  switch (meta.group) {
    case Group::UKH: return RadarRegion::UKH;
    case Group::UKL: return RadarRegion::UKL;
    case Group::IL: return meta.region == Region::ValleDAosta ? RadarRegion::IL_AV : RadarRegion::IL_P;
    case Group::IH: return meta.region == Region::ValleDAosta ? RadarRegion::IH_AV : RadarRegion::IH_P;
  }
  fail(ErrorKind::Contract, "unknown station group");
}

RadarSheet radar_sheet(std::string month, const ClusterReport& report, std::span<const StationMeta> meta) {
  std::map<std::string, const StationMeta*> by_id;
  for (const auto& m : meta) {
    by_id[m.station_id] = &m;
  }
  struct Acc {
    double sum{};
    std::size_t count{};
  };
  std::map<std::pair<int, int>, Acc> acc;
  for (const auto& [station, cluster] : report.assignment) {
    const auto it = by_id.find(station);
    if (it == by_id.end()) {
      fail(ErrorKind::Contract, "radar_sheet: station " + station + " missing from metadata");
    }
    const auto s = report.silhouettes.find(station);
    require(s != report.silhouettes.end(), "radar_sheet: station " + station + " has no silhouette");
    auto& a = acc[{cluster, static_cast<int>(radar_region(*it->second))}];
    a.sum += s->second;
    ++a.count;
  }
  RadarSheet sheet;
  sheet.month = std::move(month);
  for (const auto& [key, a] : acc) {
    sheet.rows.push_back({key.first, static_cast<RadarRegion>(key.second), a.sum / static_cast<double>(a.count),
                          a.count});
  }
  return sheet;
}

void write_radar_header(std::ostream& out) { out << "month,cluster,region,mean_silhouette,count\n"; }

void write_radar(std::ostream& out, const RadarSheet& sheet) {
  for (const auto& r : sheet.rows) {
    out << io::csv_field(sheet.month) << ',' << r.cluster << ',' << to_string(r.region) << ','
        << io::format_double(r.mean_silhouette) << ',' << r.count << '\n';
  }
}

std::string roman(int value) {
  require(value >= 1 && value <= 3999, "roman numeral out of range");
  static constexpr std::array<std::pair<int, const char*>, 13> kTable = {{{1000, "M"},
                                                                          {900, "CM"},
                                                                          {500, "D"},
                                                                          {400, "CD"},
                                                                          {100, "C"},
                                                                          {90, "XC"},
                                                                          {50, "L"},
                                                                          {40, "XL"},
                                                                          {10, "X"},
                                                                          {9, "IX"},
                                                                          {5, "V"},
                                                                          {4, "IV"},
                                                                          {1, "I"}}};
  std::string out;
  for (const auto& [v, s] : kTable) {
    while (value >= v) {
      out += s;
      value -= v;
    }
  }
  return out;
}

std::string cluster_table(const std::map<int, ClusterReport>& reports, std::span<const StationMeta> meta) {
  static constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",
                                                               "May",     "June",     "July",      "August",
                                                               "September", "October", "November", "December"};
  static constexpr std::array<Group, 4> kGroups = {Group::IH, Group::IL, Group::UKH, Group::UKL};
  std::map<std::string, Group> group_of;
  for (const auto& m : meta) {
    group_of[m.station_id] = m.group;
  }
  std::size_t k = 0;
  for (int month = 1; month <= 12; ++month) {
    const auto it = reports.find(month);
    if (it == reports.end()) {
      fail(ErrorKind::Contract, "cluster_table: no cluster report for " + std::string(kMonths[month - 1]));
    }
    k = std::max(k, it->second.k);
  }

  std::ostringstream out;
  out << "month,group";
  for (std::size_t c = 1; c <= k; ++c) {
    out << ",cluster_" << roman(static_cast<int>(c));
  }
  out << ",s_score\n";
  for (int month = 1; month <= 12; ++month) {
    const ClusterReport& r = reports.at(month);
    std::string score;
    if (r.mean_silhouette) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", *r.mean_silhouette);
      score = buf;
    }
    for (const Group g : kGroups) {
      std::vector<std::vector<std::string>> cells(k);
      for (const auto& [station, cluster] : r.assignment) {
        const auto it = group_of.find(station);
        if (it == group_of.end()) {
          fail(ErrorKind::Contract, "cluster_table: station " + station + " missing from metadata");
        }
        if (it->second == g) {
          cells.at(static_cast<std::size_t>(cluster - 1)).push_back(station);
        }
      }
      out << kMonths[month - 1] << ',' << to_string(g);
      for (auto& cell : cells) {
        std::sort(cell.begin(), cell.end());
        std::string joined;
        for (const auto& s : cell) {
          if (!joined.empty()) {
            joined += ' ';
          }
          joined += s;
        }
        out << ',' << io::csv_field(joined);
      }
      out << ',' << score << '\n';
    }
  }
  return out.str();
}

TemperatureSeries synth_station(const SynthConfig& config) {
  require(config.years >= 1, "synth_station: years must be >= 1");
  require(config.noise_sigma >= 0.0 && std::isfinite(config.noise_sigma), "synth_station: sigma must be >= 0");
  require(config.missing_fraction >= 0.0 && config.missing_fraction < 1.0,
          "synth_station: missing fraction must lie in [0, 1)");
  require(config.step > 0 && kDay % config.step == 0, "synth_station: step must divide a day");

  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  TemperatureSeries s;
  s.station_id = config.station_id;
  s.step = config.step;
  s.start = days_from_civil(config.start_year, 1, 1) * kDay;
  const Timestamp end = days_from_civil(config.start_year + config.years, 1, 1) * kDay;
  const auto length = static_cast<std::size_t>((end - s.start) / config.step);
  s.values.resize(length);
  s.missing.assign(length, false);

  std::mt19937_64 noise_rng(config.seed);
  std::mt19937_64 mask_rng(config.seed ^ 0xA5A5A5A5DEADBEEFULL);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < length; ++k) {
    const Timestamp t = s.time_at(k);
    const CivilDate d = date_of(t);
    const double hour_phase = std::sin(kTwoPi * hour_of(t) / 24.0);
    const double years_elapsed = d.year - config.start_year;
    double v = config.base + config.diurnal_amplitude * hour_phase +
               config.annual_amplitude * std::sin(kTwoPi * day_of_year(d) / 365.25) +
               (config.trend + config.trend_shape * hour_phase) * years_elapsed;
    if (config.noise_sigma > 0.0) {
      v += config.noise_sigma * noise(noise_rng);
    }
    s.values[k] = v;
    if (config.missing_fraction > 0.0 && unit(mask_rng) < config.missing_fraction) {
      s.missing[k] = true;
      s.values[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return s;
}

}  // namespace diurnal
