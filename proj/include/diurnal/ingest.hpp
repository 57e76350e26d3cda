/**
 * @file ingest.hpp
 * @brief Station metadata and raw temperature records: parsing, hourly normalization, missingness.
 */
#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diurnal/civil_time.hpp"

namespace diurnal {

enum class Group { UKH, UKL, IH, IL };
enum class Region { UK, Piemonte, ValleDAosta };

std::string_view to_string(Group group);
std::string_view to_string(Region region);
std::optional<Group> parse_group(std::string_view text);
/// Accepts `UK`, `Piemonte`, `ValleDAosta` and the spelled-out `Valle d'Aosta`.
std::optional<Region> parse_region(std::string_view text);

struct StationMeta {
  std::string station_id;
  std::string name;
  Group group{Group::UKH};
  Region region{Region::UK};
  double latitude{};
  double longitude{};
  double altitude_m{};
};

/// Reads the `station_id,name,group,region,latitude,longitude,altitude_m` table.
/// Rejects duplicate ids, out-of-range coordinates, negative altitude and UK groups outside the UK.
std::vector<StationMeta> parse_metadata(std::istream& in);
void write_metadata(std::ostream& out, std::span<const StationMeta> stations);

/**
 * @brief Dense, fixed-step temperature series. Gaps are masked, never omitted.
 *
 * Slot k sits at `start + k * step`. Masked slots hold NaN in `values`.
 */
struct TemperatureSeries {
  std::string station_id;
  Timestamp start{};
  Duration step{kHour};
  std::vector<double> values;
  std::vector<bool> missing;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] bool empty() const noexcept { return values.empty(); }
  [[nodiscard]] Timestamp time_at(std::size_t k) const noexcept {
    return start + static_cast<Timestamp>(k) * step;
  }
  [[nodiscard]] Timestamp last_time() const noexcept { return time_at(size() - 1); }
  [[nodiscard]] std::size_t missing_count() const noexcept;

  /// Throws ErrorKind::Contract when the invariants do not hold.
  void validate() const;
};

/**
 * @brief Parses `station_id,timestamp,temp_c` lines for one station into a dense series.
 *
 * The header line is optional. Records may come in any order. Timestamps must sit on
 * the `expected_step` grid; slots without a record, or with an empty temp_c, are masked.
 */
TemperatureSeries parse_records(std::istream& in, Duration expected_step);

/// Same as parse_records but splits a multi-station file; keyed and ordered by station id.
std::map<std::string, TemperatureSeries> parse_records_by_station(std::istream& in, Duration expected_step);

void write_records_header(std::ostream& out);
void write_records(std::ostream& out, const TemperatureSeries& series);

/// Half-hourly to hourly means; (H:00, H:30) contribute to hour H.
TemperatureSeries to_hourly(const TemperatureSeries& series);

/// Re-indexes onto [first, last] (inclusive, on the series grid), masking new slots and
/// dropping slots outside the span.
TemperatureSeries reindex_to_span(const TemperatureSeries& series, Timestamp first, Timestamp last);

struct MissingReport {
  std::string station_id;
  std::size_t total_slots{};
  std::size_t missing_slots{};
  double missing_pct{};
};

MissingReport missing_report(const TemperatureSeries& series);

}  // namespace diurnal
