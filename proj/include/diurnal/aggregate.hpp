/**
 * @file aggregate.hpp
 * @brief Window calendars (10/30/60-day) and per-hour-of-day window means.
 */
#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "diurnal/civil_time.hpp"
#include "diurnal/ingest.hpp"

namespace diurnal {

inline constexpr int kHoursPerDay = 24;

enum class Scale { Day10, Day30, Day60A, Day60B };

/// "10d", "30d", "60da", "60db"
std::string_view to_string(Scale scale);
std::optional<Scale> parse_scale(std::string_view text);

/// Inclusive day range inside one month. `last_day` past the month end means "through month end".
/// `year_offset` shifts the window's year label relative to the calendar year of the day.
struct DayRange {
  int month{};
  int first_day{};
  int last_day{};
  int year_offset{};
};

struct Window {
  std::string label;
  std::vector<DayRange> ranges;
};

struct WindowSlot {
  int year_label{};
  std::size_t window{};
};

class WindowCalendar {
 public:
  WindowCalendar(Scale scale, std::vector<Window> windows);

  [[nodiscard]] Scale scale() const noexcept { return scale_; }
  [[nodiscard]] const std::vector<Window>& windows() const noexcept { return windows_; }
  [[nodiscard]] std::size_t size() const noexcept { return windows_.size(); }
  [[nodiscard]] const std::string& label(std::size_t w) const { return windows_.at(w).label; }
  [[nodiscard]] std::optional<std::size_t> find_label(std::string_view label) const;

  /// Window and year label for a date. Every valid date maps to exactly one slot.
  [[nodiscard]] WindowSlot locate(const CivilDate& date) const;

 private:
  struct Entry {
    std::size_t window{};
    int year_offset{};
    bool set{false};
  };

  Scale scale_;
  std::vector<Window> windows_;
  std::array<std::array<Entry, 31>, 12> lookup_{};
};

/**
 * Day10: months split into 1-10, 11-20, 21-end (36 windows).
 * Day30: calendar months (12).
 * Day60A: Jan-Feb ... Nov-Dec (6).
 * Day60B: Dec-Jan, Feb-Mar ... Oct-Nov (6); Dec-Jan of label Y is Dec Y plus Jan Y+1.
 */
WindowCalendar build_calendar(Scale scale);

struct PanelCell {
  double mean{};
  std::size_t count{};
  [[nodiscard]] bool valid() const noexcept { return count > 0; }
};

/// mean_temp[year][window][hour]; a cell is valid iff at least one reading contributed.
struct WindowHourPanel {
  std::string station_id;
  WindowCalendar calendar{build_calendar(Scale::Day30)};
  std::vector<int> years;
  std::vector<PanelCell> cells;

  [[nodiscard]] std::size_t index(std::size_t year_idx, std::size_t window, int hour) const noexcept {
    return (year_idx * calendar.size() + window) * kHoursPerDay + static_cast<std::size_t>(hour);
  }
  [[nodiscard]] const PanelCell& at(std::size_t year_idx, std::size_t window, int hour) const {
    return cells.at(index(year_idx, window, hour));
  }
  [[nodiscard]] PanelCell& at(std::size_t year_idx, std::size_t window, int hour) {
    return cells.at(index(year_idx, window, hour));
  }
};

/// Means of all non-missing readings per (year label, window, UTC hour).
/// Masked slots never contribute, so a raw series yields a mask-skipping panel.
WindowHourPanel hourly_window_means(const TemperatureSeries& series, const WindowCalendar& calendar);

struct YearValue {
  int year{};
  double value{};
};

/// Valid cells of one (window, hour) across years, in year order.
std::vector<YearValue> year_series(const WindowHourPanel& panel, std::size_t window, int hour);

void write_panel_header(std::ostream& out);
void write_panel(std::ostream& out, const WindowHourPanel& panel);

/// Reads panels back from the export format. Contributor counts are not stored, so valid
/// cells come back with count 1.
std::map<std::string, WindowHourPanel> parse_panels(std::istream& in);

}  // namespace diurnal
