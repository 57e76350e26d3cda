/**
 * @file trend.cpp
 * @brief Nonparametric trend statistics.
 */
#include "diurnal/trend.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "diurnal/error.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {
namespace {

void require_finite(std::span<const double> x, const char* what) {
  for (const double v : x) {
    require(std::isfinite(v), std::string(what) + ": non-finite input");
  }
}

long long tie_term(long long t) { return t * (t - 1) * (2 * t + 5); }

}  // namespace

TrendDirection classify(long long s, double p_value) noexcept {
  if (p_value >= kSignificance || s == 0) {
    return TrendDirection::NoTrend;
  }
  return s > 0 ? TrendDirection::Increasing : TrendDirection::Decreasing;
}

MKResult mk_test(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) {
    fail(ErrorKind::SampleTooSmall, "mk_test needs at least 4 values, got " + std::to_string(n));
  }
  require_finite(x, "mk_test");

  long long s = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      s += (x[j] > x[k]) - (x[j] < x[k]);
    }
  }

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  long long ties = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) {
      ++j;
    }
    ties += tie_term(static_cast<long long>(j - i));
    i = j;
  }
  const auto nn = static_cast<long long>(n);
  const long long numerator = tie_term(nn) - ties;
  if (numerator <= 0) {
    fail(ErrorKind::Degenerate, "mk_test: all values tied, Var(S) = 0");
  }

  MKResult r;
  r.n = n;
  r.s = s;
  r.var_s = static_cast<double>(numerator) / 18.0;
  const double sd = std::sqrt(r.var_s);
  if (s > 0) {
    r.z = static_cast<double>(s - 1) / sd;
  } else if (s < 0) {
    r.z = static_cast<double>(s + 1) / sd;
  }
  r.p_value = std::clamp(std::erfc(std::abs(r.z) / std::sqrt(2.0)), 0.0, 1.0);
  r.direction = classify(s, r.p_value);
  return r;
}

SenSlope sen_slope(std::span<const double> x, std::span<const double> t) {
  require(x.size() == t.size(), "sen_slope: values and times differ in length");
  const std::size_t n = x.size();
  if (n < 2) {
    fail(ErrorKind::SampleTooSmall, "sen_slope needs at least 2 values, got " + std::to_string(n));
  }
  require_finite(x, "sen_slope");
  require_finite(t, "sen_slope");
  for (std::size_t i = 1; i < n; ++i) {
    require(t[i] > t[i - 1], "sen_slope: time indices must be strictly increasing");
  }

  std::vector<double> slopes;
  slopes.reserve(n * (n - 1) / 2);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t j = k + 1; j < n; ++j) {
      slopes.push_back((x[j] - x[k]) / (t[j] - t[k]));
    }
  }
  const std::size_t m = slopes.size();
  const auto mid = slopes.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(slopes.begin(), mid, slopes.end());
  double median = *mid;
  if (m % 2 == 0) {
    const double lower = *std::max_element(slopes.begin(), mid);
    median = (lower + median) / 2.0;
  }
  return {median, m};
}

Lag1 lag1_autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) {
    fail(ErrorKind::SampleTooSmall, "lag1_autocorrelation needs at least 3 values");
  }
  require_finite(x, "lag1_autocorrelation");
  double mean = 0.0;
  for (const double v : x) {
    mean += v;
  }
  mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    den += d * d;
    if (i + 1 < n) {
      num += d * (x[i + 1] - mean);
    }
  }
  if (!(den > 0.0)) {
    fail(ErrorKind::Degenerate, "lag1_autocorrelation: constant sequence");
  }
  Lag1 r;
  r.r1 = num / den;
  r.bound = 1.96 / std::sqrt(static_cast<double>(n));
  r.serial = std::abs(r.r1) > r.bound;
  return r;
}

std::size_t TrendSurface::present_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const TrendCell& c) { return c.present(); }));
}

TrendSurface trend_surface(const WindowHourPanel& panel) {
  TrendSurface surface;
  surface.station_id = panel.station_id;
  surface.calendar = panel.calendar;
  surface.cells.reserve(panel.calendar.size() * kHoursPerDay);
  std::vector<double> values;
  std::vector<double> years;
  for (std::size_t w = 0; w < panel.calendar.size(); ++w) {
    for (int h = 0; h < kHoursPerDay; ++h) {
      TrendCell cell;
      cell.window = w;
      cell.hour = h;
      const auto ys = year_series(panel, w, h);
      cell.n = ys.size();
      if (ys.size() >= kMinTrendYears) {
        values.clear();
        years.clear();
        for (const auto& yv : ys) {
          values.push_back(yv.value);
          years.push_back(static_cast<double>(yv.year));
        }
        try {
          cell.mk = mk_test(values);
          cell.sen = sen_slope(values, years);
          const Lag1 l = lag1_autocorrelation(values);
          cell.lag1 = l.r1;
          cell.serial_corr_flag = l.serial;
          cell.status = CellStatus::Present;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Degenerate) {
            throw;
          }
          cell.status = CellStatus::Degenerate;
        }
      }
      surface.cells.push_back(cell);
    }
  }
  return surface;
}

void write_trend_header(std::ostream& out) {
  out << "station_id,scale,window_label,hour,n,S,var_S,z,p_value,sen_slope,lag1,serial_flag\n";
}

void write_trend(std::ostream& out, const TrendSurface& surface) {
  const std::string id = io::csv_field(surface.station_id);
  const auto scale = to_string(surface.calendar.scale());
  for (const auto& c : surface.cells) {
    out << id << ',' << scale << ',' << surface.calendar.label(c.window) << ',' << c.hour << ',' << c.n << ',';
    if (c.present()) {
      out << c.mk.s << ',' << io::format_double(c.mk.var_s) << ',' << io::format_double(c.mk.z) << ','
          << io::format_double(c.mk.p_value) << ',' << io::format_double(c.sen.slope) << ','
          << io::format_double(c.lag1) << ',' << (c.serial_corr_flag ? 1 : 0);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  }
}

std::map<std::string, TrendSurface> parse_trends(std::istream& in) {
  std::map<std::string, TrendSurface> out;
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
    const auto where = "trend line " + std::to_string(line_no) + ": ";
    if (f.size() != 12) {
      fail(ErrorKind::Parse, where + "expected 12 fields", line_no);
    }
    const auto scale = parse_scale(f[1]);
    const auto hour = io::parse_int(f[3]);
    const auto n = io::parse_int(f[4]);
    if (!scale || !hour || *hour < 0 || *hour >= kHoursPerDay || !n || *n < 0) {
      fail(ErrorKind::Parse, where + "malformed field", line_no);
    }
    const std::string id{io::trim(f[0])};
    auto [it, inserted] = out.try_emplace(id);
    TrendSurface& s = it->second;
    if (inserted) {
      s.station_id = id;
      s.calendar = build_calendar(*scale);
      s.cells.resize(s.calendar.size() * kHoursPerDay);
      for (std::size_t i = 0; i < s.cells.size(); ++i) {
        s.cells[i].window = i / kHoursPerDay;
        s.cells[i].hour = static_cast<int>(i % kHoursPerDay);
      }
    } else if (s.calendar.scale() != *scale) {
      fail(ErrorKind::Parse, where + "station mixes scales", line_no);
    }
    const auto window = s.calendar.find_label(io::trim(f[2]));
    if (!window) {
      fail(ErrorKind::Parse, where + "unknown window label '" + f[2] + "'", line_no);
    }
    TrendCell& c = s.cells[*window * kHoursPerDay + static_cast<std::size_t>(*hour)];
    c.n = static_cast<std::size_t>(*n);
    if (io::trim(f[5]).empty()) {
      c.status = c.n >= kMinTrendYears ? CellStatus::Degenerate : CellStatus::TooFewYears;
      continue;
    }
    const auto sv = io::parse_int(f[5]);
    const auto var = io::parse_double(f[6]);
    const auto z = io::parse_double(f[7]);
    const auto p = io::parse_double(f[8]);
    const auto slope = io::parse_double(f[9]);
    const auto lag = io::parse_double(f[10]);
    const auto flag = io::parse_int(f[11]);
    if (!sv || !var || !z || !p || !slope || !lag || !flag) {
      fail(ErrorKind::Parse, where + "malformed statistic", line_no);
    }
    c.status = CellStatus::Present;
    c.mk = MKResult{c.n, *sv, *var, *z, *p, classify(*sv, *p)};
    c.sen = SenSlope{*slope, c.n * (c.n - 1) / 2};
    c.lag1 = *lag;
    c.serial_corr_flag = *flag != 0;
  }
  if (out.empty()) {
    fail(ErrorKind::EmptyInput, "trend file contains no rows");
  }
  return out;
}

}  // namespace diurnal
