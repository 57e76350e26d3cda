/**
 * @file pipeline.cpp
 * @brief Stage orchestration and per-window file emission.
 */
#include "diurnal/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "diurnal/error.hpp"
#include "diurnal/parallel.hpp"
#include "diurnal/text_io.hpp"

namespace diurnal {
namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

template <typename In, typename Out, typename Fn>
std::map<std::string, Out> map_stations(const std::map<std::string, In>& in, unsigned threads, Fn fn) {
  std::vector<const std::pair<const std::string, In>*> items;
  for (const auto& kv : in) {
    items.push_back(&kv);
  }
  std::vector<std::optional<Out>> results(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) { results[i].emplace(fn(items[i]->second)); });
  std::map<std::string, Out> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.emplace(items[i]->first, std::move(*results[i]));
  }
  return out;
}

}  // namespace

StationMap normalize(StationMap records, const PipelineConfig& config) {
  require(config.step == kHour || config.step == kHalfHour, "records step must be 1 hour or 30 minutes");
  StationMap out;
  for (auto& [id, s] : records) {
    require(s.step == config.step, "station " + id + " step differs from the configured step");
    TemperatureSeries hourly = s.step == kHalfHour ? to_hourly(s) : std::move(s);
    if (config.span) {
      hourly = reindex_to_span(hourly, config.span->first, config.span->second);
    }
    out.emplace(id, std::move(hourly));
  }
  return out;
}

std::vector<MissingReport> missing_reports(const StationMap& hourly) {
  std::vector<MissingReport> out;
  for (const auto& [id, s] : hourly) {
    out.push_back(missing_report(s));
  }
  return out;
}

void write_missing_reports(std::ostream& out, const std::vector<MissingReport>& reports) {
  out << "station_id,total_slots,missing_slots,missing_pct\n";
  for (const auto& r : reports) {
    out << io::csv_field(r.station_id) << ',' << r.total_slots << ',' << r.missing_slots << ','
        << io::format_double(r.missing_pct) << '\n';
  }
}

StationMap impute_all(const StationMap& hourly, unsigned threads) {
  const SeasonalBlockPlan plan = SeasonalBlockPlan::monthly();
  return map_stations<TemperatureSeries, TemperatureSeries>(
      hourly, threads, [&](const TemperatureSeries& s) { return seasonal_split_impute(s, plan); });
}

std::map<std::string, WindowHourPanel> build_panels(const StationMap& series, const WindowCalendar& calendar,
                                                    unsigned threads) {
  return map_stations<TemperatureSeries, WindowHourPanel>(
      series, threads, [&](const TemperatureSeries& s) { return hourly_window_means(s, calendar); });
}

std::map<std::string, TrendSurface> build_trends(const std::map<std::string, WindowHourPanel>& panels,
                                                 unsigned threads) {
  return map_stations<WindowHourPanel, TrendSurface>(panels, threads,
                                                     [](const WindowHourPanel& p) { return trend_surface(p); });
}

std::vector<Feature> slope_features(const std::map<std::string, TrendSurface>& trends, std::size_t window) {
  std::vector<Feature> out;
  for (const auto& [id, surface] : trends) {
    require(window < surface.calendar.size(), "window index out of range for station " + id);
    Feature f{id, {}};
    for (int h = 0; h < kHoursPerDay; ++h) {
      const TrendCell& c = surface.at(window, h);
      require(c.present(), "station " + id + " has no trend at window " + surface.calendar.label(window) +
                               " hour " + std::to_string(h));
      f.values.push_back(c.sen.slope);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Feature> mean_features(const std::map<std::string, WindowHourPanel>& panels, std::size_t window) {
  std::vector<Feature> out;
  for (const auto& [id, panel] : panels) {
    require(window < panel.calendar.size(), "window index out of range for station " + id);
    Feature f{id, {}};
    for (int h = 0; h < kHoursPerDay; ++h) {
      const auto ys = year_series(panel, window, h);
      require(!ys.empty(), "station " + id + " has no valid years at window " + panel.calendar.label(window) +
                               " hour " + std::to_string(h));
      double sum = 0.0;
      for (const auto& yv : ys) {
        sum += yv.value;
      }
      f.values.push_back(sum / static_cast<double>(ys.size()));
    }
    out.push_back(std::move(f));
  }
  return out;
}

WindowClusters cluster_window(std::size_t window, std::string label, const std::vector<Feature>& features,
                              const PipelineConfig& config) {
  WindowClusters w;
  w.window = window;
  w.label = std::move(label);
  w.matrix = pairwise_dtw(features, config.dtw, config.threads);
  w.report = cluster_and_validate(w.matrix, config.k);
  return w;
}

DcorMatrix dcor_matrix(const std::vector<Feature>& features, std::size_t window, const PipelineConfig& config) {
  const std::size_t n = features.size();
  DcorMatrix m;
  for (const auto& f : features) {
    m.labels.push_back(f.label);
  }
  m.dcor.assign(n * n, 0.0);
  if (config.permutations > 0) {
    m.p_value.assign(n * n, 0.0);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      pairs.emplace_back(i, j);
    }
  }
  parallel_for(pairs.size(), config.threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    DcorResult r;
    if (config.permutations > 0) {
      const std::uint64_t seed = mix(mix(mix(config.seed, window), i), j);
      r = dcor_permutation_test(features[i].values, features[j].values, config.permutations, seed, 1);
      m.p_value[i * n + j] = m.p_value[j * n + i] = *r.p_value;
    } else {
      r = dcor(features[i].values, features[j].values);
    }
    m.dcor[i * n + j] = m.dcor[j * n + i] = r.dcor;
  });
  return m;
}

std::string window_stem(const WindowCalendar& calendar, std::size_t window) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02zu_", window + 1);
  return buf + calendar.label(window);
}

void write_assignment(std::ostream& out, const ClusterReport& report) {
  out << "station_id,cluster_id,silhouette\n";
  for (const auto& [station, cluster] : report.assignment) {
    out << io::csv_field(station) << ',' << cluster << ',';
    if (const auto it = report.silhouettes.find(station); it != report.silhouettes.end()) {
      out << io::format_double(it->second);
    }
    out << '\n';
  }
}

void write_merges(std::ostream& out, const ClusterReport& report) {
  out << "step,clusterA,clusterB,height\n";
  for (std::size_t s = 0; s < report.merges.size(); ++s) {
    const Merge& m = report.merges[s];
    out << s + 1 << ',' << m.cluster_a << ',' << m.cluster_b << ',' << io::format_double(m.height) << '\n';
  }
}

ClusterReport parse_assignment(std::istream& in) {
  ClusterReport report;
  std::set<int> ids;
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
    const auto cluster = f.size() == 3 ? io::parse_int(f[1]) : std::nullopt;
    if (!cluster || *cluster < 1) {
      fail(ErrorKind::Parse, "assignment line " + std::to_string(line_no) + ": malformed row", line_no);
    }
    const std::string id{io::trim(f[0])};
    report.assignment[id] = static_cast<int>(*cluster);
    ids.insert(static_cast<int>(*cluster));
    if (!io::trim(f[2]).empty()) {
      const auto s = io::parse_double(f[2]);
      if (!s) {
        fail(ErrorKind::Parse, "assignment line " + std::to_string(line_no) + ": malformed silhouette", line_no);
      }
      report.silhouettes[id] = *s;
    }
  }
  if (report.assignment.empty()) {
    fail(ErrorKind::EmptyInput, "assignment file has no rows");
  }
  report.k = ids.size();
  report.leaf_order.clear();
  for (const auto& [id, c] : report.assignment) {
    report.leaf_order.push_back(id);
  }
  if (report.silhouettes.size() == report.assignment.size()) {
    double total = 0.0;
    for (const auto& [id, s] : report.silhouettes) {
      total += s;
    }
    report.mean_silhouette = total / static_cast<double>(report.silhouettes.size());
  }
  return report;
}

void write_cluster_outputs(const std::filesystem::path& dir, const WindowCalendar& calendar,
                           const std::vector<WindowClusters>& windows, const std::vector<StationMeta>* meta) {
  for (const auto& w : windows) {
    const std::string stem = window_stem(calendar, w.window);
    auto assign = io::open_output(dir / ("assign_" + stem + ".csv"));
    write_assignment(assign, w.report);
    auto merges = io::open_output(dir / ("merges_" + stem + ".csv"));
    write_merges(merges, w.report);
    auto dist = io::open_output(dir / ("distance_" + stem + ".csv"));
    write_matrix(dist, w.matrix.labels, w.matrix.d);
  }
  if (meta != nullptr && calendar.scale() == Scale::Day30 && windows.size() == 12) {
    std::map<int, ClusterReport> by_month;
    for (const auto& w : windows) {
      by_month[static_cast<int>(w.window) + 1] = w.report;
    }
    auto table = io::open_output(dir / "cluster_table.csv");
    table << cluster_table(by_month, *meta);
  }
}

void write_radar_from_dir(std::ostream& out, const std::filesystem::path& dir, const std::vector<StationMeta>& meta) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("assign_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    fail(ErrorKind::Io, "cannot list cluster directory '" + dir.string() + "'");
  }
  if (files.empty()) {
    fail(ErrorKind::EmptyInput, "no assign_*.csv files in '" + dir.string() + "'");
  }
  std::sort(files.begin(), files.end());
  write_radar_header(out);
  for (const auto& path : files) {
    auto in = io::open_input(path);
    const ClusterReport report = parse_assignment(in);
    // assign_NN_<label>.csv
    std::string label = path.stem().string().substr(7);
    if (const auto us = label.find('_'); us != std::string::npos) {
      label = label.substr(us + 1);
    }
    write_radar(out, radar_sheet(label, report, meta));
  }
}

void run_pipeline(const StationMap& records, const std::vector<StationMeta>* meta, const PipelineConfig& config,
                  const std::filesystem::path& out_dir) {
  const StationMap hourly = normalize(records, config);
  {
    auto out = io::open_output(out_dir / "missing.csv");
    write_missing_reports(out, missing_reports(hourly));
  }
  const StationMap series = config.skip_missing ? hourly : impute_all(hourly, config.threads);
  const WindowCalendar calendar = build_calendar(config.scale);
  const auto panels = build_panels(series, calendar, config.threads);
  const auto trends = build_trends(panels, config.threads);
  {
    auto out = io::open_output(out_dir / "panel.csv");
    write_panel_header(out);
    for (const auto& [id, p] : panels) {
      write_panel(out, p);
    }
  }
  {
    auto out = io::open_output(out_dir / "trend.csv");
    write_trend_header(out);
    for (const auto& [id, t] : trends) {
      write_trend(out, t);
    }
  }
  {
    auto out = io::open_output(out_dir / "contour.csv");
    write_contour_header(out);
    for (const auto& [id, t] : trends) {
      write_contour(out, contour_grid(t));
    }
  }
  if (trends.size() < 2) {
    return;
  }

  std::vector<WindowClusters> windows;
  for (std::size_t w = 0; w < calendar.size(); ++w) {
    const auto features = config.features == FeatureKind::Slope ? slope_features(trends, w) : mean_features(panels, w);
    windows.push_back(cluster_window(w, calendar.label(w), features, config));
    const DcorMatrix dm = dcor_matrix(features, w, config);
    const std::string stem = window_stem(calendar, w);
    auto out = io::open_output(out_dir / "dcor" / ("dcor_" + stem + ".csv"));
    write_matrix(out, dm.labels, dm.dcor);
    if (!dm.p_value.empty()) {
      auto pout = io::open_output(out_dir / "dcor" / ("dcor_p_" + stem + ".csv"));
      write_matrix(pout, dm.labels, dm.p_value);
    }
  }
  write_cluster_outputs(out_dir / "clusters", calendar, windows, meta);
  if (meta != nullptr && config.k >= 2) {
    auto out = io::open_output(out_dir / "radar.csv");
    write_radar_from_dir(out, out_dir / "clusters", *meta);
  }
}

}  // namespace diurnal
