/**
 * @file aggregate.cpp
 * @brief Window calendars and hour-of-day panels.
 */
#include "diurnal/aggregate.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "diurnal/error.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {
namespace {

constexpr std::array<std::string_view, 12> kMonthNames = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

Window month_pair(int first, int second, int first_offset = 0) {
  Window w;
  w.label = std::string(kMonthNames[first - 1]) + "-" + std::string(kMonthNames[second - 1]);
  w.ranges.push_back({first, 1, 31, first_offset});
  w.ranges.push_back({second, 1, 31, 0});
  return w;
}

}  // namespace

std::string_view to_string(Scale scale) {
  switch (scale) {
    case Scale::Day10: return "10d";
    case Scale::Day30: return "30d";
    case Scale::Day60A: return "60da";
    case Scale::Day60B: return "60db";
  }
  return "?";
}

std::optional<Scale> parse_scale(std::string_view text) {
  text = io::trim(text);
  if (text == "10d") return Scale::Day10;
  if (text == "30d") return Scale::Day30;
  if (text == "60da") return Scale::Day60A;
  if (text == "60db") return Scale::Day60B;
  return std::nullopt;
}

WindowCalendar::WindowCalendar(Scale scale, std::vector<Window> windows)
    : scale_(scale), windows_(std::move(windows)) {
  for (std::size_t w = 0; w < windows_.size(); ++w) {
    for (const auto& r : windows_[w].ranges) {
      require(r.month >= 1 && r.month <= 12 && r.first_day >= 1 && r.first_day <= r.last_day,
              "malformed day range in window " + windows_[w].label);
      for (int d = r.first_day; d <= std::min(r.last_day, 31); ++d) {
        auto& e = lookup_[r.month - 1][d - 1];
        require(!e.set, "windows overlap at month " + std::to_string(r.month) + " day " + std::to_string(d));
        e = Entry{w, r.year_offset, true};
      }
    }
  }
  for (int m = 1; m <= 12; ++m) {
    for (int d = 1; d <= days_in_month(2000, m); ++d) {  // 2000 is leap: covers Feb 29
      require(lookup_[m - 1][d - 1].set,
              "windows leave month " + std::to_string(m) + " day " + std::to_string(d) + " uncovered");
    }
  }
}

std::optional<std::size_t> WindowCalendar::find_label(std::string_view label) const {
  for (std::size_t w = 0; w < windows_.size(); ++w) {
    if (windows_[w].label == label) {
      return w;
    }
  }
  return std::nullopt;
}

WindowSlot WindowCalendar::locate(const CivilDate& date) const {
  const auto& e = lookup_.at(static_cast<std::size_t>(date.month - 1)).at(static_cast<std::size_t>(date.day - 1));
  return {date.year + e.year_offset, e.window};
}

WindowCalendar build_calendar(Scale scale) {
  std::vector<Window> windows;
  switch (scale) {
    case Scale::Day10:
      for (int m = 1; m <= 12; ++m) {
        const std::string name{kMonthNames[m - 1]};
        windows.push_back({name + "_01-10", {{m, 1, 10, 0}}});
        windows.push_back({name + "_11-20", {{m, 11, 20, 0}}});
        windows.push_back({name + "_21-end", {{m, 21, 31, 0}}});
      }
      break;
    case Scale::Day30:
      for (int m = 1; m <= 12; ++m) {
        windows.push_back({std::string(kMonthNames[m - 1]), {{m, 1, 31, 0}}});
      }
      break;
    case Scale::Day60A:
      for (int m = 1; m <= 11; m += 2) {
        windows.push_back(month_pair(m, m + 1));
      }
      break;
    case Scale::Day60B: {
      Window dec_jan;
      dec_jan.label = "Dec-Jan";
      dec_jan.ranges.push_back({12, 1, 31, 0});
      dec_jan.ranges.push_back({1, 1, 31, -1});
      windows.push_back(std::move(dec_jan));
      for (int m = 2; m <= 10; m += 2) {
        windows.push_back(month_pair(m, m + 1));
      }
      break;
    }
  }
  return WindowCalendar(scale, std::move(windows));
}

WindowHourPanel hourly_window_means(const TemperatureSeries& series, const WindowCalendar& calendar) {
  series.validate();
  int first_year = std::numeric_limits<int>::max();
  int last_year = std::numeric_limits<int>::min();
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (!series.missing[k]) {
      const int y = calendar.locate(date_of(series.time_at(k))).year_label;
      first_year = std::min(first_year, y);
      last_year = std::max(last_year, y);
    }
  }
  if (first_year > last_year) {
    fail(ErrorKind::EmptyInput, "empty panel: station " + series.station_id + " has no readings in the calendar span");
  }

  WindowHourPanel panel;
  panel.station_id = series.station_id;
  panel.calendar = calendar;
  for (int y = first_year; y <= last_year; ++y) {
    panel.years.push_back(y);
  }
  panel.cells.assign(panel.years.size() * calendar.size() * kHoursPerDay, PanelCell{});
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series.missing[k]) {
      continue;
    }
    const Timestamp t = series.time_at(k);
    const WindowSlot slot = calendar.locate(date_of(t));
    const auto idx = panel.index(static_cast<std::size_t>(slot.year_label - first_year), slot.window, hour_of(t));
    // running mean keeps a cell of equal readings exactly at that reading
    PanelCell& cell = panel.cells[idx];
    ++cell.count;
    cell.mean += (series.values[k] - cell.mean) / static_cast<double>(cell.count);
  }
  return panel;
}

std::vector<YearValue> year_series(const WindowHourPanel& panel, std::size_t window, int hour) {
  require(window < panel.calendar.size() && hour >= 0 && hour < kHoursPerDay, "year_series index out of range");
  std::vector<YearValue> out;
  out.reserve(panel.years.size());
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    const auto& cell = panel.at(y, window, hour);
    if (cell.valid()) {
      out.push_back({panel.years[y], cell.mean});
    }
  }
  return out;
}

void write_panel_header(std::ostream& out) { out << "station_id,scale,year,window_label,hour,mean_temp,valid\n"; }

void write_panel(std::ostream& out, const WindowHourPanel& panel) {
  const std::string id = io::csv_field(panel.station_id);
  const auto scale = to_string(panel.calendar.scale());
  for (std::size_t y = 0; y < panel.years.size(); ++y) {
    for (std::size_t w = 0; w < panel.calendar.size(); ++w) {
      for (int h = 0; h < kHoursPerDay; ++h) {
        const auto& cell = panel.at(y, w, h);
        out << id << ',' << scale << ',' << panel.years[y] << ',' << panel.calendar.label(w) << ',' << h << ',';
        if (cell.valid()) {
          out << io::format_double(cell.mean);
        }
        out << ',' << (cell.valid() ? 1 : 0) << '\n';
      }
    }
  }
}

std::map<std::string, WindowHourPanel> parse_panels(std::istream& in) {
  struct Row {
    int year;
    std::size_t window;
    int hour;
    std::optional<double> mean;
  };
  struct Pending {
    std::optional<WindowCalendar> calendar;
    std::vector<Row> rows;
  };
  std::map<std::string, Pending> pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (io::trim(line).empty()) {
      continue;
    }
    const auto f = io::split_csv(line);
    if (!f.empty() && io::trim(f[0]) == "station_id") {
      continue;
    }
    const auto where = "panel line " + std::to_string(line_no) + ": ";
    if (f.size() != 7) {
      fail(ErrorKind::Parse, where + "expected 7 fields", line_no);
    }
    const auto scale = parse_scale(f[1]);
    const auto year = io::parse_int(f[2]);
    const auto hour = io::parse_int(f[4]);
    const auto valid = io::parse_int(f[6]);
    if (!scale || !year || !hour || *hour < 0 || *hour >= kHoursPerDay || !valid) {
      fail(ErrorKind::Parse, where + "malformed field", line_no);
    }
    auto& p = pending[std::string(io::trim(f[0]))];
    if (!p.calendar) {
      p.calendar = build_calendar(*scale);
    } else if (p.calendar->scale() != *scale) {
      fail(ErrorKind::Parse, where + "station mixes scales", line_no);
    }
    const auto window = p.calendar->find_label(io::trim(f[3]));
    if (!window) {
      fail(ErrorKind::Parse, where + "unknown window label '" + f[3] + "'", line_no);
    }
    Row row{static_cast<int>(*year), *window, static_cast<int>(*hour), std::nullopt};
    if (*valid != 0) {
      row.mean = io::parse_double(f[5]);
      if (!row.mean) {
        fail(ErrorKind::Parse, where + "valid cell without a mean", line_no);
      }
    }
    p.rows.push_back(row);
  }
  std::map<std::string, WindowHourPanel> out;
  for (auto& [id, p] : pending) {
    WindowHourPanel panel;
    panel.station_id = id;
    panel.calendar = *p.calendar;
    const auto [lo, hi] = std::minmax_element(p.rows.begin(), p.rows.end(),
                                              [](const Row& a, const Row& b) { return a.year < b.year; });
    for (int y = lo->year; y <= hi->year; ++y) {
      panel.years.push_back(y);
    }
    panel.cells.assign(panel.years.size() * panel.calendar.size() * kHoursPerDay, PanelCell{});
    for (const auto& r : p.rows) {
      if (r.mean) {
        auto& cell = panel.at(static_cast<std::size_t>(r.year - lo->year), r.window, r.hour);
        cell.mean = *r.mean;
        cell.count = 1;
      }
    }
    out.emplace(id, std::move(panel));
  }
  if (out.empty()) {
    fail(ErrorKind::EmptyInput, "panel file contains no rows");
  }
  return out;
}

}  // namespace diurnal
