/**
 * @file ingest.cpp
 * @brief Records and metadata parsing.
 */
#include "diurnal/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "diurnal/error.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RawRecord {
  Timestamp time{};
  std::optional<double> value;
  std::size_t line{};
};

bool is_header(const std::vector<std::string>& fields) {
  return !fields.empty() && io::trim(fields[0]) == "station_id";
}

TemperatureSeries densify(const std::string& station_id, std::vector<RawRecord> records, Duration step) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RawRecord& a, const RawRecord& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].time == records[i - 1].time) {
      const std::size_t line = std::max(records[i].line, records[i - 1].line);
      fail(ErrorKind::Duplicate,
           "duplicate timestamp " + format_iso8601(records[i].time) + " for station " + station_id + " at line " +
               std::to_string(line),
           line);
    }
  }
  const bool any_value = std::any_of(records.begin(), records.end(), [](const RawRecord& r) { return r.value; });
  if (!any_value) {
    fail(ErrorKind::EmptyInput, "no usable temperature rows for station " + station_id);
  }

  TemperatureSeries series;
  series.station_id = station_id;
  series.step = step;
  series.start = records.front().time;
  const auto length = static_cast<std::size_t>((records.back().time - series.start) / step) + 1;
  series.values.assign(length, kNaN);
  series.missing.assign(length, true);
  for (const auto& r : records) {
    if (r.value) {
      const auto k = static_cast<std::size_t>((r.time - series.start) / step);
      series.values[k] = *r.value;
      series.missing[k] = false;
    }
  }
  return series;
}

std::map<std::string, std::vector<RawRecord>> read_raw(std::istream& in, Duration step) {
  require(step > 0, "expected step must be positive");
  std::map<std::string, std::vector<RawRecord>> by_station;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) {
      continue;
    }
    const auto fields = io::split_csv(line);
    if (first) {
      first = false;
      if (is_header(fields)) {
        continue;
      }
    }
    if (fields.size() != 3) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 3 fields, got " +
                                 std::to_string(fields.size()), line_no);
    }
    const std::string id{io::trim(fields[0])};
    if (id.empty()) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty station_id", line_no);
    }
    const auto ts = parse_iso8601(io::trim(fields[1]));
    if (!ts) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed timestamp '" + fields[1] + "'",
           line_no);
    }
    if (floor_to(*ts, step) != *ts) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": timestamp is not on the " +
                                 std::to_string(step) + " s grid", line_no);
    }
    RawRecord rec{*ts, std::nullopt, line_no};
    const auto temp_text = io::trim(fields[2]);
    if (!temp_text.empty()) {
      const auto v = io::parse_double(temp_text);
      if (!v || !std::isfinite(*v)) {
        fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": malformed temperature '" + fields[2] + "'",
             line_no);
      }
      rec.value = *v;
    }
    by_station[id].push_back(rec);
  }
  return by_station;
}

}  // namespace

std::string_view to_string(Group group) {
  switch (group) {
    case Group::UKH: return "UKH";
    case Group::UKL: return "UKL";
    case Group::IH: return "IH";
    case Group::IL: return "IL";
  }
  return "?";
}

std::string_view to_string(Region region) {
  switch (region) {
    case Region::UK: return "UK";
    case Region::Piemonte: return "Piemonte";
    case Region::ValleDAosta: return "ValleDAosta";
  }
  return "?";
}

std::optional<Group> parse_group(std::string_view text) {
  text = io::trim(text);
  if (text == "UKH") return Group::UKH;
  if (text == "UKL") return Group::UKL;
  if (text == "IH") return Group::IH;
  if (text == "IL") return Group::IL;
  return std::nullopt;
}

std::optional<Region> parse_region(std::string_view text) {
  text = io::trim(text);
  if (text == "UK") return Region::UK;
  if (text == "Piemonte") return Region::Piemonte;
  if (text == "ValleDAosta" || text == "Valle d'Aosta" || text == "Valle dAosta") return Region::ValleDAosta;
  return std::nullopt;
}

std::vector<StationMeta> parse_metadata(std::istream& in) {
  std::vector<StationMeta> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) {
      continue;
    }
    const auto f = io::split_csv(line);
    if (first) {
      first = false;
      if (is_header(f)) {
        continue;
      }
    }
    const auto where = "metadata line " + std::to_string(line_no) + ": ";
    if (f.size() != 7) {
      fail(ErrorKind::Parse, where + "expected 7 fields", line_no);
    }
    StationMeta m;
    m.station_id = std::string(io::trim(f[0]));
    m.name = std::string(io::trim(f[1]));
    const auto group = parse_group(f[2]);
    const auto region = parse_region(f[3]);
    const auto lat = io::parse_double(f[4]);
    const auto lon = io::parse_double(f[5]);
    const auto alt = io::parse_double(f[6]);
    if (m.station_id.empty() || !group || !region || !lat || !lon || !alt) {
      fail(ErrorKind::Parse, where + "malformed field", line_no);
    }
    m.group = *group;
    m.region = *region;
    m.latitude = *lat;
    m.longitude = *lon;
    m.altitude_m = *alt;
    if (!(m.latitude >= -90.0 && m.latitude <= 90.0) || !(m.longitude >= -180.0 && m.longitude <= 180.0) ||
        !(m.altitude_m >= 0.0)) {
      fail(ErrorKind::Contract, where + "coordinates or altitude out of range");
    }
    const bool uk_group = m.group == Group::UKH || m.group == Group::UKL;
    if (uk_group != (m.region == Region::UK)) {
      fail(ErrorKind::Contract, where + "group " + std::string(to_string(m.group)) + " inconsistent with region " +
                                    std::string(to_string(m.region)));
    }
    if (!seen.insert(m.station_id).second) {
      fail(ErrorKind::Duplicate, where + "duplicate station_id " + m.station_id, line_no);
    }
    out.push_back(std::move(m));
  }
  if (out.empty()) {
    fail(ErrorKind::EmptyInput, "metadata contains no stations");
  }
  return out;
}

void write_metadata(std::ostream& out, std::span<const StationMeta> stations) {
  out << "station_id,name,group,region,latitude,longitude,altitude_m\n";
  for (const auto& m : stations) {
    out << io::csv_field(m.station_id) << ',' << io::csv_field(m.name) << ',' << to_string(m.group) << ','
        << to_string(m.region) << ',' << io::format_double(m.latitude) << ',' << io::format_double(m.longitude)
        << ',' << io::format_double(m.altitude_m) << '\n';
  }
}

std::size_t TemperatureSeries::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true));
}

void TemperatureSeries::validate() const {
  require(values.size() == missing.size(), "values and missing mask differ in length");
  require(step > 0, "step must be positive");
  for (std::size_t k = 0; k < values.size(); ++k) {
    require(missing[k] || std::isfinite(values[k]), "non-missing value is not finite");
  }
}

TemperatureSeries parse_records(std::istream& in, Duration expected_step) {
  auto by_station = read_raw(in, expected_step);
  if (by_station.empty()) {
    fail(ErrorKind::EmptyInput, "records contain no data rows");
  }
  if (by_station.size() > 1) {
    fail(ErrorKind::Parse, "records mix stations " + by_station.begin()->first + " and " +
                               std::next(by_station.begin())->first + "; use parse_records_by_station");
  }
  auto& [id, records] = *by_station.begin();
  return densify(id, std::move(records), expected_step);
}

std::map<std::string, TemperatureSeries> parse_records_by_station(std::istream& in, Duration expected_step) {
  auto raw = read_raw(in, expected_step);
  if (raw.empty()) {
    fail(ErrorKind::EmptyInput, "records contain no data rows");
  }
  std::map<std::string, TemperatureSeries> out;
  for (auto& [id, records] : raw) {
    out.emplace(id, densify(id, std::move(records), expected_step));
  }
  return out;
}

void write_records_header(std::ostream& out) { out << "station_id,timestamp,temp_c\n"; }

void write_records(std::ostream& out, const TemperatureSeries& series) {
  const std::string id = io::csv_field(series.station_id);
  for (std::size_t k = 0; k < series.size(); ++k) {
    out << id << ',' << format_iso8601(series.time_at(k)) << ',';
    if (!series.missing[k]) {
      out << io::format_double(series.values[k]);
    }
    out << '\n';
  }
}

TemperatureSeries to_hourly(const TemperatureSeries& series) {
  require(series.step == kHalfHour, "to_hourly expects a 30-minute series, got step " +
                                        std::to_string(series.step) + " s");
  TemperatureSeries out;
  out.station_id = series.station_id;
  out.step = kHour;
  if (series.empty()) {
    out.start = floor_to(series.start, kHour);
    return out;
  }
  out.start = floor_to(series.start, kHour);
  const auto length = static_cast<std::size_t>((floor_to(series.last_time(), kHour) - out.start) / kHour) + 1;
  std::vector<double> sum(length, 0.0);
  std::vector<int> count(length, 0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series.missing[k]) {
      continue;
    }
    const auto h = static_cast<std::size_t>((series.time_at(k) - out.start) / kHour);
    sum[h] += series.values[k];
    ++count[h];
  }
  out.values.assign(length, kNaN);
  out.missing.assign(length, true);
  for (std::size_t h = 0; h < length; ++h) {
    if (count[h] > 0) {
      out.values[h] = sum[h] / count[h];
      out.missing[h] = false;
    }
  }
  return out;
}

TemperatureSeries reindex_to_span(const TemperatureSeries& series, Timestamp first, Timestamp last) {
  require(first <= last, "span start after span end");
  require(floor_to(first - series.start, series.step) == first - series.start &&
              floor_to(last - series.start, series.step) == last - series.start,
          "span bounds are not on the series grid");
  TemperatureSeries out;
  out.station_id = series.station_id;
  out.step = series.step;
  out.start = first;
  const auto length = static_cast<std::size_t>((last - first) / series.step) + 1;
  out.values.assign(length, kNaN);
  out.missing.assign(length, true);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Timestamp t = series.time_at(k);
    if (t < first || t > last) {
      continue;
    }
    const auto j = static_cast<std::size_t>((t - first) / series.step);
    out.values[j] = series.values[k];
    out.missing[j] = series.missing[k];
  }
  return out;
}

MissingReport missing_report(const TemperatureSeries& series) {
  if (series.empty()) {
    fail(ErrorKind::EmptyInput, "missing_report on an empty series");
  }
  MissingReport r;
  r.station_id = series.station_id;
  r.total_slots = series.size();
  r.missing_slots = series.missing_count();
  r.missing_pct = 100.0 * static_cast<double>(r.missing_slots) / static_cast<double>(r.total_slots);
  return r;
}

}  // namespace diurnal
