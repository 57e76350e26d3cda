#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "diurnal/error.hpp"
#include "diurnal/report.hpp"
#include "diurnal/trend.hpp"
#include "oracles.hpp"

using namespace diurnal;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected diurnal::Error");
  return ErrorKind::Contract;
}

std::vector<double> iota_time(std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i + 1);
  return t;
}

}  // namespace

TEST_CASE("mk_test examples") {
  const auto up = mk_test(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(up.s == 10);
  CHECK(up.direction == TrendDirection::Increasing);

  const auto mixed = mk_test(std::vector<double>{3, 1, 2, 5, 4});
  CHECK(mixed.s == 4);
  CHECK(mixed.p_value > 0.05);
  CHECK(mixed.p_value == doctest::Approx(0.462433).epsilon(1e-5));
  CHECK(mixed.direction == TrendDirection::NoTrend);

  const auto down = mk_test(std::vector<double>{5, 4, 3, 2, 1});
  CHECK(down.s == -10);
  CHECK(down.z < 0);
}

TEST_CASE("mk_test errors") {
  CHECK(kind_of([] { mk_test(std::vector<double>{1, 2, 3}); }) == ErrorKind::SampleTooSmall);
  CHECK(kind_of([] { mk_test(std::vector<double>{2, 2, 2, 2}); }) == ErrorKind::Degenerate);
  CHECK(kind_of([] { mk_test(std::vector<double>{1, 2, NAN, 4}); }) == ErrorKind::Contract);
}

TEST_CASE("mk_test matches pair enumeration and the tie-corrected variance") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
    const auto x = oracle::random_sequence(rng, n, trial % 2 == 0);
    if (oracle::mk_var(x) <= 0.0) continue;
    const auto r = mk_test(x);
    CHECK(r.s == oracle::mk_s(x));
    CHECK(r.var_s == doctest::Approx(oracle::mk_var(x)).epsilon(1e-14));
    CHECK(std::abs(r.p_value - oracle::mk_p(x)) < 1e-12);
    const long long max_s = static_cast<long long>(n * (n - 1) / 2);
    CHECK(std::llabs(r.s) <= max_s);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK((r.direction == TrendDirection::NoTrend) == (r.p_value >= 0.05));
    if (r.direction == TrendDirection::Increasing) CHECK(r.s > 0);
    if (r.direction == TrendDirection::Decreasing) CHECK(r.s < 0);
  }
}

TEST_CASE("mk_test is antisymmetric under reversal of values") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = oracle::random_sequence(rng, 10, false);
    auto neg = x;
    for (auto& v : neg) v = -v;
    const auto a = mk_test(x);
    const auto b = mk_test(neg);
    CHECK(a.s == -b.s);
    CHECK(a.p_value == b.p_value);
  }
}

TEST_CASE("sen_slope examples") {
  CHECK(sen_slope(std::vector<double>{3, 3, 3, 3}, iota_time(4)).slope == 0.0);
  CHECK(sen_slope(std::vector<double>{2, 4, 6, 8, 10}, iota_time(5)).slope == 2.0);
  const auto s = sen_slope(std::vector<double>{1, 4, 2, 8}, iota_time(4));
  CHECK(s.slope == doctest::Approx(13.0 / 6.0).epsilon(1e-15));
  CHECK(s.pair_count == 6);
  CHECK(kind_of([] { sen_slope(std::vector<double>{1}, std::vector<double>{1}); }) == ErrorKind::SampleTooSmall);
}

TEST_CASE("sen_slope equals the sorted median oracle bitwise") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 20);
    const auto x = oracle::random_sequence(rng, n, trial % 3 == 0);
    std::vector<double> t;
    double year = 2000;
    for (std::size_t i = 0; i < n; ++i) t.push_back(year += 1 + static_cast<double>(rng() % 3));
    const auto s = sen_slope(x, t);
    CHECK(s.slope == oracle::sen(x, t));
    CHECK(s.pair_count <= n * (n - 1) / 2);
  }
}

TEST_CASE("lag1 examples") {
  const auto a = lag1_autocorrelation(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(a.r1 == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(a.bound == doctest::Approx(0.692965).epsilon(1e-5));
  CHECK_FALSE(a.serial);

  std::vector<double> alt;
  for (int i = 0; i < 20; ++i) alt.push_back(i % 2 == 0 ? 1.0 : -1.0);
  const auto b = lag1_autocorrelation(alt);
  CHECK(b.r1 == doctest::Approx(-0.95).epsilon(1e-12));
  CHECK(b.serial);

  CHECK(kind_of([] { lag1_autocorrelation(std::vector<double>{4, 4, 4, 4}); }) == ErrorKind::Degenerate);
}

TEST_CASE("lag1 matches the direct formula and rarely fires on white noise") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 1.0);
  int fired = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(200);
    for (auto& v : x) v = noise(rng);
    const auto r = lag1_autocorrelation(x);
    CHECK(r.r1 == doctest::Approx(oracle::lag1(x)).epsilon(1e-12));
    CHECK(r.serial == (std::abs(r.r1) > r.bound));
    fired += r.serial ? 1 : 0;
  }
  CHECK(fired < 30);
}

TEST_CASE("trend_surface on a noiseless linear trend") {
  SynthConfig cfg;
  cfg.station_id = "LIN";
  cfg.trend = 0.05;
  cfg.noise_sigma = 0.0;
  cfg.annual_amplitude = 8.0;
  cfg.years = 20;
  const auto panel = hourly_window_means(synth_station(cfg), build_calendar(Scale::Day30));
  const auto surface = trend_surface(panel);
  CHECK(surface.cells.size() == 288);
  CHECK(surface.present_count() == 288);
  for (const auto& c : surface.cells) {
    CHECK(c.n == 20);
    CHECK(std::abs(c.sen.slope - 0.05) < 1e-9);
    CHECK(c.mk.direction == TrendDirection::Increasing);
  }
}

TEST_CASE("trend_surface marks short and tied cells absent") {
  SynthConfig cfg;
  cfg.station_id = "GAP";
  cfg.trend = 0.1;
  cfg.noise_sigma = 0.3;
  cfg.years = 6;
  auto series = synth_station(cfg);
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (date_of(series.time_at(k)).month == 4) {
      series.missing[k] = true;
      series.values[k] = NAN;
    }
  }
  const auto surface = trend_surface(hourly_window_means(series, build_calendar(Scale::Day30)));
  CHECK(surface.present_count() == 264);
  for (int h = 0; h < 24; ++h) {
    CHECK(surface.at(3, h).status == CellStatus::TooFewYears);
    CHECK(surface.at(3, h).n == 0);
  }

  SynthConfig flat;
  flat.station_id = "FLAT";
  flat.noise_sigma = 0.0;
  flat.years = 5;
  const auto tied = trend_surface(hourly_window_means(synth_station(flat), build_calendar(Scale::Day30)));
  CHECK(tied.at(0, 0).status == CellStatus::Degenerate);
}

TEST_CASE("trend CSV round trip") {
  SynthConfig cfg;
  cfg.station_id = "RT";
  cfg.trend = 0.03;
  cfg.noise_sigma = 0.4;
  cfg.years = 8;
  cfg.seed = 5;
  const auto surface = trend_surface(hourly_window_means(synth_station(cfg), build_calendar(Scale::Day60A)));
  std::ostringstream out;
  write_trend_header(out);
  write_trend(out, surface);
  std::istringstream in(out.str());
  const auto back = parse_trends(in);
  REQUIRE(back.count("RT") == 1);
  const auto& r = back.at("RT");
  CHECK(r.calendar.scale() == Scale::Day60A);
  REQUIRE(r.cells.size() == surface.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    CHECK(r.cells[i].status == surface.cells[i].status);
    CHECK(r.cells[i].sen.slope == surface.cells[i].sen.slope);
    CHECK(r.cells[i].mk.p_value == surface.cells[i].mk.p_value);
    CHECK(r.cells[i].mk.s == surface.cells[i].mk.s);
  }
}
