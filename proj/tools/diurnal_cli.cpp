/**
 * @file diurnal_cli.cpp
 * @brief Command-line front end: impute, aggregate, trend, cluster, dcor, contour, radar, synth, pipeline.
 *
 * Exit codes: 0 success, 1 usage or contract error, 2 I/O or input-format error.
 */
#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diurnal/error.hpp"
#include "diurnal/pipeline.hpp"
#include "diurnal/text_io.hpp"

namespace fs = std::filesystem;
using namespace diurnal;

namespace {

constexpr int kExitContract = 1;
constexpr int kExitIo = 2;

struct GlobalOptions {
  std::string scale{"30d"};
  std::size_t k{4};
  double lambda{0.0};
  std::string weights{"1,1,2"};
  std::uint64_t seed{0};
  std::string out_dir{"."};
  unsigned threads{1};
};

Duration parse_step(const std::string& text) {
  if (text == "1h" || text == "60m") return kHour;
  if (text == "30m") return kHalfHour;
  fail(ErrorKind::Contract, "unknown step '" + text + "' (expected 1h or 30m)");
}

Scale scale_from(const GlobalOptions& g) {
  const auto s = parse_scale(g.scale);
  require(s.has_value(), "unknown scale '" + g.scale + "' (expected 10d, 30d, 60da or 60db)");
  return *s;
}

DtwConfig dtw_from(const GlobalOptions& g) {
  const auto parts = io::split_csv(g.weights);
  require(parts.size() == 3, "--weights expects wh,wv,wd");
  DtwConfig cfg;
  const auto wh = io::parse_double(parts[0]);
  const auto wv = io::parse_double(parts[1]);
  const auto wd = io::parse_double(parts[2]);
  require(wh && wv && wd, "--weights expects three numbers");
  cfg.wh = *wh;
  cfg.wv = *wv;
  cfg.wd = *wd;
  cfg.lambda = g.lambda;
  cfg.validate();
  return cfg;
}

std::optional<std::pair<Timestamp, Timestamp>> parse_span(const std::string& text) {
  if (text.empty()) {
    return std::nullopt;
  }
  const auto parts = io::split_csv(text);
  require(parts.size() == 2, "--span expects FIRST,LAST timestamps");
  const auto first = parse_iso8601(io::trim(parts[0]));
  const auto last = parse_iso8601(io::trim(parts[1]));
  require(first && last, "--span timestamps must be ISO-8601 UTC");
  return std::make_pair(*first, *last);
}

PipelineConfig pipeline_config(const GlobalOptions& g) {
  PipelineConfig cfg;
  cfg.scale = scale_from(g);
  cfg.dtw = dtw_from(g);
  cfg.k = g.k;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  return cfg;
}

StationMap read_records(const fs::path& path, Duration step) {
  auto in = io::open_input(path);
  return parse_records_by_station(in, step);
}

std::vector<StationMeta> read_meta(const fs::path& path) {
  auto in = io::open_input(path);
  return parse_metadata(in);
}

std::map<std::string, TrendSurface> read_trends(const fs::path& path) {
  auto in = io::open_input(path);
  return parse_trends(in);
}

std::map<std::string, WindowHourPanel> read_panels(const fs::path& path) {
  auto in = io::open_input(path);
  return parse_panels(in);
}

const WindowCalendar& common_calendar(const std::map<std::string, TrendSurface>& trends) {
  const WindowCalendar& cal = trends.begin()->second.calendar;
  for (const auto& [id, t] : trends) {
    require(t.calendar.scale() == cal.scale(), "trend file mixes scales");
  }
  return cal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diurnal temperature trend and pattern-similarity pipeline"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file mirroring the flags; command-line flags win");

  GlobalOptions g;
  app.add_option("--scale", g.scale, "Window scale: 10d, 30d, 60da, 60db")->capture_default_str();
  app.add_option("--k", g.k, "Cluster count")->capture_default_str();
  app.add_option("--lambda", g.lambda, "DTW index-gap penalty")->capture_default_str();
  app.add_option("--weights", g.weights, "DTW move weights wh,wv,wd")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for synthetic data and permutation tests")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::function<void()> action;

  // impute
  auto* impute = app.add_subcommand("impute", "Fill gaps by seasonal-split linear interpolation");
  std::string imp_in, imp_out, imp_block{"month"}, imp_step{"1h"}, imp_span, imp_missing;
  impute->add_option("--in", imp_in, "Records CSV")->required();
  impute->add_option("--out", imp_out, "Imputed records CSV")->required();
  impute->add_option("--block", imp_block, "Seasonal block (month)")->capture_default_str();
  impute->add_option("--step", imp_step, "Record step: 1h or 30m")->capture_default_str();
  impute->add_option("--span", imp_span, "FIRST,LAST timestamps pinning the period");
  impute->add_option("--missing-report", imp_missing, "Write per-station missing percentages here");
  impute->callback([&] {
    action = [&] {
      require(imp_block == "month", "unsupported block '" + imp_block + "' (only month)");
      PipelineConfig cfg = pipeline_config(g);
      cfg.step = parse_step(imp_step);
      cfg.span = parse_span(imp_span);
      const StationMap hourly = normalize(read_records(imp_in, cfg.step), cfg);
      if (!imp_missing.empty()) {
        auto out = io::open_output(imp_missing);
        write_missing_reports(out, missing_reports(hourly));
      }
      const StationMap filled = impute_all(hourly, g.threads);
      auto out = io::open_output(imp_out);
      write_records_header(out);
      for (const auto& [id, s] : filled) {
        write_records(out, s);
      }
    };
  });

  // aggregate
  auto* aggregate = app.add_subcommand("aggregate", "Per-hour window means (panel CSV)");
  std::string agg_in, agg_out, agg_step{"1h"};
  bool agg_skip = false;
  aggregate->add_option("--in", agg_in, "Records CSV (imputed unless --skip-missing)")->required();
  aggregate->add_option("--out", agg_out, "Panel CSV (default <out-dir>/panel.csv)");
  aggregate->add_option("--step", agg_step, "Record step: 1h or 30m")->capture_default_str();
  aggregate->add_flag("--skip-missing", agg_skip, "Aggregate raw data, skipping masked slots instead of imputing");
  aggregate->callback([&] {
    action = [&] {
      PipelineConfig cfg = pipeline_config(g);
      cfg.step = parse_step(agg_step);
      StationMap series = normalize(read_records(agg_in, cfg.step), cfg);
      if (!agg_skip) {
        series = impute_all(series, g.threads);
      }
      const auto panels = build_panels(series, build_calendar(cfg.scale), g.threads);
      auto out = io::open_output(agg_out.empty() ? fs::path(g.out_dir) / "panel.csv" : fs::path(agg_out));
      write_panel_header(out);
      for (const auto& [id, p] : panels) {
        write_panel(out, p);
      }
    };
  });

  // trend
  auto* trend = app.add_subcommand("trend", "Mann-Kendall and Sen slope per (window, hour)");
  std::string tr_in, tr_out;
  trend->add_option("--in", tr_in, "Panel CSV")->required();
  trend->add_option("--out", tr_out, "Trend CSV (default <out-dir>/trend.csv)");
  trend->callback([&] {
    action = [&] {
      const Scale scale = scale_from(g);
      const auto panels = read_panels(tr_in);
      for (const auto& [id, p] : panels) {
        require(p.calendar.scale() == scale, "panel for " + id + " is at scale " +
                                                 std::string(to_string(p.calendar.scale())) + ", not " + g.scale);
      }
      const auto trends = build_trends(panels, g.threads);
      auto out = io::open_output(tr_out.empty() ? fs::path(g.out_dir) / "trend.csv" : fs::path(tr_out));
      write_trend_header(out);
      for (const auto& [id, t] : trends) {
        write_trend(out, t);
      }
      for (const auto& [id, t] : trends) {
        std::size_t flagged = 0;
        for (const auto& c : t.cells) {
          flagged += c.present() && c.serial_corr_flag ? 1 : 0;
        }
        if (flagged > 0) {
          std::cerr << "warning: " << id << ": " << flagged << " cells show lag-1 serial correlation\n";
        }
      }
    };
  });

  // cluster
  auto* cluster = app.add_subcommand("cluster", "DTW + average-linkage clustering per window");
  std::string cl_trend, cl_panel, cl_meta, cl_features{"slope"};
  cluster->add_option("--trend", cl_trend, "Trend CSV")->required();
  cluster->add_option("--panel", cl_panel, "Panel CSV (needed for --features value)");
  cluster->add_option("--meta", cl_meta, "Metadata CSV (enables cluster_table.csv)");
  cluster->add_option("--features", cl_features, "slope or value")->capture_default_str();
  cluster->callback([&] {
    action = [&] {
      PipelineConfig cfg = pipeline_config(g);
      require(cl_features == "slope" || cl_features == "value", "--features must be slope or value");
      const auto trends = read_trends(cl_trend);
      const WindowCalendar& cal = common_calendar(trends);
      std::map<std::string, WindowHourPanel> panels;
      if (cl_features == "value") {
        require(!cl_panel.empty(), "--features value needs --panel");
        panels = read_panels(cl_panel);
      }
      std::vector<WindowClusters> windows;
      for (std::size_t w = 0; w < cal.size(); ++w) {
        const auto features = cl_features == "slope" ? slope_features(trends, w) : mean_features(panels, w);
        windows.push_back(cluster_window(w, cal.label(w), features, cfg));
      }
      std::optional<std::vector<StationMeta>> meta;
      if (!cl_meta.empty()) {
        meta = read_meta(cl_meta);
      }
      write_cluster_outputs(g.out_dir, cal, windows, meta ? &*meta : nullptr);
    };
  });

  // dcor
  auto* dcor_cmd = app.add_subcommand("dcor", "Distance-correlation matrices of slope curves per window");
  std::string dc_trend;
  std::size_t dc_perm = 0;
  dcor_cmd->add_option("--trend", dc_trend, "Trend CSV")->required();
  dcor_cmd->add_option("--permutations", dc_perm, "Permutations for p-values (0 = none, else >= 99)")
      ->capture_default_str();
  dcor_cmd->callback([&] {
    action = [&] {
      PipelineConfig cfg = pipeline_config(g);
      cfg.permutations = dc_perm;
      const auto trends = read_trends(dc_trend);
      const WindowCalendar& cal = common_calendar(trends);
      for (std::size_t w = 0; w < cal.size(); ++w) {
        const DcorMatrix m = dcor_matrix(slope_features(trends, w), w, cfg);
        const std::string stem = window_stem(cal, w);
        auto out = io::open_output(fs::path(g.out_dir) / ("dcor_" + stem + ".csv"));
        write_matrix(out, m.labels, m.dcor);
        if (!m.p_value.empty()) {
          auto pout = io::open_output(fs::path(g.out_dir) / ("dcor_p_" + stem + ".csv"));
          write_matrix(pout, m.labels, m.p_value);
        }
      }
    };
  });

  // contour
  auto* contour = app.add_subcommand("contour", "Band slopes and p-values for contour plots");
  std::string co_trend, co_out;
  contour->add_option("--trend", co_trend, "Trend CSV")->required();
  contour->add_option("--out", co_out, "Contour CSV (default <out-dir>/contour.csv)");
  contour->callback([&] {
    action = [&] {
      const auto trends = read_trends(co_trend);
      auto out = io::open_output(co_out.empty() ? fs::path(g.out_dir) / "contour.csv" : fs::path(co_out));
      write_contour_header(out);
      for (const auto& [id, t] : trends) {
        write_contour(out, contour_grid(t));
      }
    };
  });

  // radar
  auto* radar = app.add_subcommand("radar", "Mean silhouette per (cluster, region) from assignment files");
  std::string ra_dir, ra_meta, ra_out;
  radar->add_option("--clusters", ra_dir, "Directory holding assign_*.csv")->required();
  radar->add_option("--meta", ra_meta, "Metadata CSV")->required();
  radar->add_option("--out", ra_out, "Radar CSV (default <out-dir>/radar.csv)");
  radar->callback([&] {
    action = [&] {
      const auto meta = read_meta(ra_meta);
      auto out = io::open_output(ra_out.empty() ? fs::path(g.out_dir) / "radar.csv" : fs::path(ra_out));
      write_radar_from_dir(out, ra_dir, meta);
    };
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Deterministic synthetic stations (records.csv, metadata.csv)");
  SynthConfig sc;
  std::size_t sy_count = 1;
  std::size_t sy_families = 1;
  std::string sy_prefix{"SYN"}, sy_step{"1h"};
  synth->add_option("--count", sy_count, "Number of stations")->capture_default_str();
  synth->add_option("--prefix", sy_prefix, "Station id prefix")->capture_default_str();
  synth->add_option("--base", sc.base, "Base temperature °C")->capture_default_str();
  synth->add_option("--diurnal-amp", sc.diurnal_amplitude, "Diurnal amplitude °C")->capture_default_str();
  synth->add_option("--annual-amp", sc.annual_amplitude, "Annual amplitude °C")->capture_default_str();
  synth->add_option("--trend", sc.trend, "Trend °C/yr")->capture_default_str();
  synth->add_option("--trend-shape", sc.trend_shape, "Hour-dependent trend amplitude °C/yr")->capture_default_str();
  synth->add_option("--families", sy_families,
                    "Shape families; family f of F gets trend-shape * f/(F-1)")
      ->capture_default_str();
  synth->add_option("--noise", sc.noise_sigma, "Noise sigma °C")->capture_default_str();
  synth->add_option("--years", sc.years, "Number of years")->capture_default_str();
  synth->add_option("--start-year", sc.start_year, "First year")->capture_default_str();
  synth->add_option("--missing-fraction", sc.missing_fraction, "Fraction of slots masked")->capture_default_str();
  synth->add_option("--step", sy_step, "1h or 30m")->capture_default_str();
  synth->callback([&] {
    action = [&] {
      require(sy_count >= 1 && sy_families >= 1, "--count and --families must be >= 1");
      sc.step = parse_step(sy_step);
      static constexpr std::array<std::pair<Group, Region>, 6> kKinds = {
          {{Group::UKH, Region::UK},
           {Group::UKL, Region::UK},
           {Group::IL, Region::ValleDAosta},
           {Group::IL, Region::Piemonte},
           {Group::IH, Region::ValleDAosta},
           {Group::IH, Region::Piemonte}}};
      auto records = io::open_output(fs::path(g.out_dir) / "records.csv");
      write_records_header(records);
      std::vector<StationMeta> meta;
      const int width = sy_count >= 100 ? 3 : 2;
      for (std::size_t i = 0; i < sy_count; ++i) {
        SynthConfig c = sc;
        std::string num = std::to_string(i + 1);
        num.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(num.size()))), '0');
        c.station_id = sy_prefix + num;
        c.seed = g.seed * 1000003ULL + i;
        const std::size_t family = i % sy_families;
        if (sy_families > 1) {
          c.trend_shape = sc.trend_shape * static_cast<double>(family) / static_cast<double>(sy_families - 1);
        }
        write_records(records, synth_station(c));
        const auto& kind = kKinds[i % kKinds.size()];
        meta.push_back({c.station_id, "Synthetic " + num, kind.first, kind.second,
                        kind.second == Region::UK ? 56.0 : 45.5, kind.second == Region::UK ? -3.5 : 7.3,
                        kind.first == Group::UKH || kind.first == Group::IH ? 1200.0 : 300.0});
      }
      auto meta_out = io::open_output(fs::path(g.out_dir) / "metadata.csv");
      write_metadata(meta_out, meta);
    };
  });

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from records to plot-ready files");
  std::string pl_records, pl_meta, pl_step{"1h"}, pl_span, pl_features{"slope"};
  bool pl_skip = false;
  std::size_t pl_perm = 0;
  pipeline->add_option("--records", pl_records, "Records CSV")->required();
  pipeline->add_option("--meta", pl_meta, "Metadata CSV");
  pipeline->add_option("--step", pl_step, "Record step: 1h or 30m")->capture_default_str();
  pipeline->add_option("--span", pl_span, "FIRST,LAST timestamps pinning the period");
  pipeline->add_option("--features", pl_features, "slope or value")->capture_default_str();
  pipeline->add_option("--permutations", pl_perm, "dcor permutations (0 = none)")->capture_default_str();
  pipeline->add_flag("--skip-missing", pl_skip, "Skip masked slots instead of imputing");
  pipeline->callback([&] {
    action = [&] {
      PipelineConfig cfg = pipeline_config(g);
      cfg.step = parse_step(pl_step);
      cfg.span = parse_span(pl_span);
      cfg.skip_missing = pl_skip;
      cfg.permutations = pl_perm;
      require(pl_features == "slope" || pl_features == "value", "--features must be slope or value");
      cfg.features = pl_features == "slope" ? FeatureKind::Slope : FeatureKind::Mean;
      std::optional<std::vector<StationMeta>> meta;
      if (!pl_meta.empty()) {
        meta = read_meta(pl_meta);
      }
      run_pipeline(read_records(pl_records, cfg.step), meta ? &*meta : nullptr, cfg, g.out_dir);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitContract;
  }

  try {
    action();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Duplicate ||
            e.kind() == ErrorKind::EmptyInput)
               ? kExitIo
               : kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  }
  return 0;
}
