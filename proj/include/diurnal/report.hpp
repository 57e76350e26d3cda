/**
 * @file report.hpp
 * @brief Plot-ready outputs: contour bands, cluster tables, radar sheets; synthetic stations.
 */
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diurnal/ingest.hpp"
#include "diurnal/similarity.hpp"
#include "diurnal/trend.hpp"

namespace diurnal {

/// (-1.0,-0.03], (-0.03,0.0], (0.0,0.03], (0.03,1.0]
inline constexpr std::array<std::string_view, 4> kSlopeBandLabels = {"(-1.0,-0.03]", "(-0.03,0.0]", "(0.0,0.03]",
                                                                     "(0.03,1.0]"};
/// (0.001,0.05], (0.05,0.10], (0.10,1]
inline constexpr std::array<std::string_view, 3> kPBandLabels = {"(0.001,0.05]", "(0.05,0.10]", "(0.10,1]"};

struct CellBands {
  int slope_band{};  ///< index into kSlopeBandLabels
  int p_band{};      ///< index into kPBandLabels
  friend bool operator==(const CellBands&, const CellBands&) = default;
};

/// Left-open, right-closed bands. Slopes clamp to [-1, 1]; p below 0.001 joins the first band.
CellBands bin_cell(double slope, double p_value);

struct ContourCell {
  std::size_t window{};
  int hour{};
  bool present{};
  double sen_slope{};
  double p_value{};
  CellBands bands;
};

struct ContourGrid {
  std::string station_id;
  Scale scale{Scale::Day30};
  std::vector<std::string> window_labels;
  std::vector<ContourCell> cells;  ///< window-major
};

ContourGrid contour_grid(const TrendSurface& surface);
void write_contour_header(std::ostream& out);
void write_contour(std::ostream& out, const ContourGrid& grid);

enum class RadarRegion { UKH, UKL, IL_AV, IL_P, IH_AV, IH_P };
inline constexpr std::array<RadarRegion, 6> kRadarRegions = {RadarRegion::UKH,   RadarRegion::UKL,
                                                             RadarRegion::IL_AV, RadarRegion::IL_P,
                                                             RadarRegion::IH_AV, RadarRegion::IH_P};
std::string_view to_string(RadarRegion region);
RadarRegion radar_region(const StationMeta& meta);

struct RadarEntry {
  int cluster{};
  RadarRegion region{};
  double mean_silhouette{};
  std::size_t count{};
};

struct RadarSheet {
  std::string month;
  std::vector<RadarEntry> rows;  ///< present (cluster, region) pairs, cluster-major then region order
};

/// Mean member silhouette per (cluster, region). Stations absent from `meta` are an error.
RadarSheet radar_sheet(std::string month, const ClusterReport& report, std::span<const StationMeta> meta);
void write_radar_header(std::ostream& out);
void write_radar(std::ostream& out, const RadarSheet& sheet);

/// Roman numeral for cluster ids in tables (1 -> "I").
std::string roman(int value);

/**
 * @brief Cluster membership table: one row per month and group (IH, IL, UKH, UKL),
 *        one column per cluster, and the month's mean silhouette to two decimals.
 *
 * `reports` is keyed by month 1-12 and must contain all twelve.
 */
std::string cluster_table(const std::map<int, ClusterReport>& reports, std::span<const StationMeta> meta);

struct SynthConfig {
  std::string station_id{"SYN"};
  double base{10.0};
  double diurnal_amplitude{5.0};
  double annual_amplitude{0.0};
  double trend{0.0};  ///< °C per year
  /// Extra trend term trend_shape * sin(2 pi hour / 24); 0 keeps the trend hour-independent.
  double trend_shape{0.0};
  double noise_sigma{0.0};
  int start_year{2002};
  int years{20};
  std::uint64_t seed{0};
  Duration step{kHour};
  /// Fraction of slots masked missing, drawn from a stream independent of the noise.
  double missing_fraction{0.0};
};

/**
 * temp = base + A_d sin(2 pi hour/24) + A_a sin(2 pi doy/365.25)
 *      + (trend + shape sin(2 pi hour/24)) (year - start_year) + N(0, sigma)
 */
TemperatureSeries synth_station(const SynthConfig& config);

}  // namespace diurnal
