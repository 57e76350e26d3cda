/**
 * @file pipeline.hpp
 * @brief Stage orchestration shared by the CLI subcommands and the end-to-end run.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "diurnal/aggregate.hpp"
#include "diurnal/impute.hpp"
#include "diurnal/ingest.hpp"
#include "diurnal/report.hpp"
#include "diurnal/similarity.hpp"
#include "diurnal/trend.hpp"

namespace diurnal {

enum class FeatureKind { Slope, Mean };

struct PipelineConfig {
  Duration step{kHour};  ///< step of the raw records; 30-minute data is averaged to hours
  std::optional<std::pair<Timestamp, Timestamp>> span;
  bool skip_missing{false};
  Scale scale{Scale::Day30};
  DtwConfig dtw;
  std::size_t k{4};
  FeatureKind features{FeatureKind::Slope};
  std::size_t permutations{0};  ///< 0 disables dcor permutation p-values
  std::uint64_t seed{0};
  unsigned threads{1};
};

using StationMap = std::map<std::string, TemperatureSeries>;

/// Hourly normalization and span re-indexing; no imputation.
StationMap normalize(StationMap records, const PipelineConfig& config);
std::vector<MissingReport> missing_reports(const StationMap& hourly);
void write_missing_reports(std::ostream& out, const std::vector<MissingReport>& reports);
/// Monthly seasonal-split imputation of every station.
StationMap impute_all(const StationMap& hourly, unsigned threads);

std::map<std::string, WindowHourPanel> build_panels(const StationMap& series, const WindowCalendar& calendar,
                                                    unsigned threads);
std::map<std::string, TrendSurface> build_trends(const std::map<std::string, WindowHourPanel>& panels,
                                                 unsigned threads);

/// 24 Sen slopes per station for one window. Absent cells are a contract error.
std::vector<Feature> slope_features(const std::map<std::string, TrendSurface>& trends, std::size_t window);
/// 24 hour-of-day means per station for one window, averaged over valid years.
std::vector<Feature> mean_features(const std::map<std::string, WindowHourPanel>& panels, std::size_t window);

struct WindowClusters {
  std::size_t window{};
  std::string label;
  DistanceMatrix matrix;
  ClusterReport report;
};

WindowClusters cluster_window(std::size_t window, std::string label, const std::vector<Feature>& features,
                              const PipelineConfig& config);

struct DcorMatrix {
  std::vector<std::string> labels;
  std::vector<double> dcor;
  std::vector<double> p_value;  ///< empty unless permutations were requested
};

/// All-pairs dcor; each pair's permutation seed derives from (seed, window, i, j).
DcorMatrix dcor_matrix(const std::vector<Feature>& features, std::size_t window, const PipelineConfig& config);

/// "01_Jan" style stem used in per-window file names.
std::string window_stem(const WindowCalendar& calendar, std::size_t window);

void write_assignment(std::ostream& out, const ClusterReport& report);
void write_merges(std::ostream& out, const ClusterReport& report);
/// Reads `station_id,cluster_id,silhouette`; fills k, assignment and silhouettes.
ClusterReport parse_assignment(std::istream& in);

/// Writes assign_/merges_/distance_ files for every window into `dir`, plus cluster_table.csv
/// when `meta` is given and the scale is 30d.
void write_cluster_outputs(const std::filesystem::path& dir, const WindowCalendar& calendar,
                           const std::vector<WindowClusters>& windows, const std::vector<StationMeta>* meta);

/// Reads every assign_*.csv in `dir` and emits radar rows in file-name order.
void write_radar_from_dir(std::ostream& out, const std::filesystem::path& dir, const std::vector<StationMeta>& meta);

/**
 * @brief Records -> missing report, panel, trend, contour, clusters, dcor, radar.
 *
 * Every file is written in canonical (station, window, hour) order, so output bytes depend
 * only on inputs and config, never on thread count.
 */
void run_pipeline(const StationMap& records, const std::vector<StationMeta>* meta, const PipelineConfig& config,
                  const std::filesystem::path& out_dir);

}  // namespace diurnal
