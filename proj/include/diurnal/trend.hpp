/**
 * @file trend.hpp
 * @brief Mann-Kendall test, Sen's slope and lag-1 serial-correlation screening.
 */
#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "diurnal/aggregate.hpp"

namespace diurnal {

inline constexpr double kSignificance = 0.05;
inline constexpr std::size_t kMinTrendYears = 4;

enum class TrendDirection { Increasing, Decreasing, NoTrend };

struct MKResult {
  std::size_t n{};
  long long s{};
  double var_s{};
  double z{};
  double p_value{1.0};
  TrendDirection direction{TrendDirection::NoTrend};
};

/**
 * @brief Mann-Kendall trend test with tie-corrected variance and continuity-corrected z.
 *
 * Var(S) = [n(n-1)(2n+5) - sum_t t(t-1)(2t+5)] / 18, p two-sided from the normal tail.
 * Requires n >= 4 (SampleTooSmall) and at least two distinct values (Degenerate).
 */
MKResult mk_test(std::span<const double> x);

/// Direction at the 0.05 level given S and p.
TrendDirection classify(long long s, double p_value) noexcept;

struct SenSlope {
  double slope{};
  std::size_t pair_count{};
};

/// Median of (x_j - x_k) / (t_j - t_k) over all j > k; t strictly increasing.
SenSlope sen_slope(std::span<const double> x, std::span<const double> t);

struct Lag1 {
  double r1{};
  double bound{};  ///< 1.96 / sqrt(n)
  bool serial{};   ///< |r1| > bound
};

/// Mean-centred lag-1 autocorrelation with the biased (n) denominator. Needs n >= 3 and variance > 0.
Lag1 lag1_autocorrelation(std::span<const double> x);

enum class CellStatus { Present, TooFewYears, Degenerate };

struct TrendCell {
  std::size_t window{};
  int hour{};
  std::size_t n{};
  CellStatus status{CellStatus::TooFewYears};
  MKResult mk;
  SenSlope sen;
  double lag1{};
  bool serial_corr_flag{};

  [[nodiscard]] bool present() const noexcept { return status == CellStatus::Present; }
};

/// One cell per (window, hour), window-major.
struct TrendSurface {
  std::string station_id;
  WindowCalendar calendar{build_calendar(Scale::Day30)};
  std::vector<TrendCell> cells;

  [[nodiscard]] const TrendCell& at(std::size_t window, int hour) const {
    return cells.at(window * kHoursPerDay + static_cast<std::size_t>(hour));
  }
  [[nodiscard]] std::size_t present_count() const noexcept;
};

/**
 * @brief Runs MK, Sen (°C per year) and lag-1 screening on every (window, hour) year-series.
 *
 * Cells with fewer than four valid years are TooFewYears; cells whose years are all tied are
 * Degenerate. Neither carries statistics.
 */
TrendSurface trend_surface(const WindowHourPanel& panel);

void write_trend_header(std::ostream& out);
/// All cells are written; absent ones keep n and leave the statistics empty.
void write_trend(std::ostream& out, const TrendSurface& surface);
std::map<std::string, TrendSurface> parse_trends(std::istream& in);

}  // namespace diurnal
