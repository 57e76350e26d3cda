#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "diurnal/error.hpp"
#include "diurnal/ingest.hpp"

using namespace diurnal;

namespace {

TemperatureSeries parse(const std::string& text, Duration step = kHour) {
  std::istringstream in(text);
  return parse_records(in, step);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected diurnal::Error");
  return ErrorKind::Contract;
}

}  // namespace

TEST_CASE("iso8601 parsing") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_iso8601("1970-01-01 01:00") == 3600);
  CHECK(parse_iso8601("2004-02-29T12:30:00+00:00") == to_timestamp({{2004, 2, 29}, 12, 30, 0}));
  CHECK_FALSE(parse_iso8601("2003-02-29T00:00Z"));
  CHECK_FALSE(parse_iso8601("2003-13-01T00:00Z"));
  CHECK_FALSE(parse_iso8601("2003-01-01T00:00+01:00"));
  CHECK_FALSE(parse_iso8601("yesterday"));
  const Timestamp t = *parse_iso8601("2021-12-31T23:00:00Z");
  CHECK(format_iso8601(t) == "2021-12-31T23:00:00Z");
  CHECK(date_of(t) == CivilDate{2021, 12, 31});
  CHECK(hour_of(t) == 23);
}

TEST_CASE("parse_records: consecutive rows") {
  const auto s = parse("station_id,timestamp,temp_c\n"
                       "GD,2002-01-01T00:00:00Z,1.0\n"
                       "GD,2002-01-01T01:00:00Z,2.0\n"
                       "GD,2002-01-01T02:00:00Z,3.0\n");
  REQUIRE(s.size() == 3);
  CHECK(s.station_id == "GD");
  CHECK(s.missing_count() == 0);
  CHECK(s.values == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.step == kHour);
}

TEST_CASE("parse_records: absent hour is masked") {
  const auto s = parse("GD,2002-01-01T02:00:00Z,3.0\nGD,2002-01-01T00:00:00Z,1.0\n");
  REQUIRE(s.size() == 3);
  CHECK(s.missing == std::vector<bool>{false, true, false});
  CHECK(std::isnan(s.values[1]));
  CHECK(s.values[2] == 3.0);
}

TEST_CASE("parse_records: empty temp_c is missing") {
  const auto s = parse("GD,2002-01-01T00:00:00Z,\nGD,2002-01-01T01:00:00Z,4.5\n");
  CHECK(s.missing.front());
  const auto single = [] {
    std::istringstream in("GD,2002-01-01T00:00:00Z,\n");
    return parse_records(in, kHour);
  };
  // a lone empty row has no usable temperature
  CHECK(kind_of([&] { single(); }) == ErrorKind::EmptyInput);
}

TEST_CASE("parse_records errors") {
  SUBCASE("malformed timestamp carries the line number") {
    try {
      parse("station_id,timestamp,temp_c\nGD,2002-01-01T00:00:00Z,1\nGD,2002-01-01X01:00,2\n");
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("duplicate timestamp") {
    CHECK(kind_of([] { parse("GD,2002-01-01T00:00Z,1\nGD,2002-01-01T00:00Z,1\n"); }) == ErrorKind::Duplicate);
  }
  SUBCASE("no rows") {
    CHECK(kind_of([] { parse("station_id,timestamp,temp_c\n"); }) == ErrorKind::EmptyInput);
  }
  SUBCASE("off-grid timestamp") {
    CHECK(kind_of([] { parse("GD,2002-01-01T00:20Z,1\n"); }) == ErrorKind::Parse);
  }
  SUBCASE("non-numeric temperature") {
    CHECK(kind_of([] { parse("GD,2002-01-01T00:00Z,warm\n"); }) == ErrorKind::Parse);
  }
  SUBCASE("mixed stations need the multi-station reader") {
    CHECK(kind_of([] { parse("A,2002-01-01T00:00Z,1\nB,2002-01-01T00:00Z,1\n"); }) == ErrorKind::Parse);
  }
}

TEST_CASE("parse_records_by_station splits and orders by id") {
  std::istringstream in("B,2002-01-01T01:00Z,2\nA,2002-01-01T00:00Z,1\nB,2002-01-01T00:00Z,1\n");
  const auto m = parse_records_by_station(in, kHour);
  REQUIRE(m.size() == 2);
  CHECK(m.begin()->first == "A");
  CHECK(m.at("B").size() == 2);
}

TEST_CASE("dense-index property holds for random sparse records") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::ostringstream text;
    std::uniform_int_distribution<int> keep(0, 2);
    Timestamp first = -1;
    Timestamp last = -1;
    for (int h = 0; h < 200; ++h) {
      if (keep(rng) == 0) continue;
      const Timestamp t = *parse_iso8601("2010-03-01T00:00Z") + h * kHour;
      if (first < 0) first = t;
      last = t;
      text << "S," << format_iso8601(t) << "," << h << "\n";
    }
    const auto s = parse(text.str());
    CHECK(s.size() == static_cast<std::size_t>((last - first) / kHour + 1));
    CHECK(s.start == first);
  }
}

TEST_CASE("to_hourly") {
  const auto s = parse("X,2002-01-01T00:00Z,10.0\nX,2002-01-01T00:30Z,12.0\n"
                       "X,2002-01-01T01:00Z,10.0\nX,2002-01-01T01:30Z,\n"
                       "X,2002-01-01T02:00Z,\nX,2002-01-01T02:30Z,\n"
                       "X,2002-01-01T03:30Z,7.0\n",
                       kHalfHour);
  const auto h = to_hourly(s);
  REQUIRE(h.size() == 4);
  CHECK(h.step == kHour);
  CHECK(h.values[0] == 11.0);
  CHECK(h.values[1] == 10.0);
  CHECK(h.missing[2]);
  CHECK(h.values[3] == 7.0);
  CHECK_THROWS_AS(to_hourly(parse("X,2002-01-01T00:00Z,1\n")), Error);
}

TEST_CASE("to_hourly starting on a half hour aligns left") {
  const auto s = parse("X,2002-01-01T00:30Z,4.0\nX,2002-01-01T01:00Z,6.0\n", kHalfHour);
  const auto h = to_hourly(s);
  CHECK(h.start == *parse_iso8601("2002-01-01T00:00Z"));
  CHECK(h.values == std::vector<double>{4.0, 6.0});
}

TEST_CASE("to_hourly never invents values") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution drop(0.4);
  std::normal_distribution<double> temp(8.0, 3.0);
  TemperatureSeries s;
  s.step = kHalfHour;
  s.start = 0;
  for (int k = 0; k < 500; ++k) {
    const bool miss = drop(rng);
    s.missing.push_back(miss);
    s.values.push_back(miss ? std::nan("") : temp(rng));
  }
  const auto h = to_hourly(s);
  CHECK(h.size() == 250);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const bool a = !s.missing[2 * i];
    const bool b = !s.missing[2 * i + 1];
    CHECK(h.missing[i] == (!a && !b));
    if (!h.missing[i]) {
      const double lo = std::min(a ? s.values[2 * i] : INFINITY, b ? s.values[2 * i + 1] : INFINITY);
      const double hi = std::max(a ? s.values[2 * i] : -INFINITY, b ? s.values[2 * i + 1] : -INFINITY);
      CHECK(h.values[i] >= lo);
      CHECK(h.values[i] <= hi);
    }
  }
}

TEST_CASE("missing_report") {
  TemperatureSeries s;
  s.station_id = "GD";
  s.values.assign(100, 1.0);
  s.missing.assign(100, false);
  CHECK(missing_report(s).missing_pct == 0.0);
  for (int i = 0; i < 7; ++i) s.missing[static_cast<std::size_t>(i * 13)] = true;
  const auto r = missing_report(s);
  CHECK(r.total_slots == 100);
  CHECK(r.missing_slots == 7);
  CHECK(r.missing_pct == doctest::Approx(7.0));
  CHECK_THROWS_AS(missing_report(TemperatureSeries{}), Error);
}

TEST_CASE("missing_report over a 2002-2021 hourly index") {
  // 7305 days x 24 h; a 7.74% share is 13570 masked hours
  const Timestamp first = *parse_iso8601("2002-01-01T00:00Z");
  const Timestamp last = *parse_iso8601("2021-12-31T23:00Z");
  TemperatureSeries s;
  s.station_id = "GD";
  s.start = first;
  s.values.assign(static_cast<std::size_t>((last - first) / kHour + 1), 3.0);
  s.missing.assign(s.values.size(), false);
  CHECK(s.size() == 175320);
  for (std::size_t k = 0; k < 13570; ++k) s.missing[k * 12] = true;
  const auto r = missing_report(s);
  CHECK(std::round(r.missing_pct * 100.0) / 100.0 == doctest::Approx(7.74));
}

TEST_CASE("reindex_to_span counts leading and trailing gaps") {
  const auto s = parse("X,2002-01-01T01:00Z,1\nX,2002-01-01T02:00Z,2\n");
  const auto padded = reindex_to_span(s, *parse_iso8601("2002-01-01T00:00Z"), *parse_iso8601("2002-01-01T04:00Z"));
  CHECK(padded.size() == 5);
  CHECK(missing_report(padded).missing_slots == 3);
  CHECK(padded.values[1] == 1.0);
  const auto cropped = reindex_to_span(s, *parse_iso8601("2002-01-01T02:00Z"), *parse_iso8601("2002-01-01T02:00Z"));
  CHECK(cropped.size() == 1);
  CHECK(cropped.values[0] == 2.0);
}

TEST_CASE("missing_pct in [0,100], zero iff nothing masked") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> len(1, 50);
    std::bernoulli_distribution drop(trial % 5 == 0 ? 0.0 : 0.3);
    TemperatureSeries s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      s.missing.push_back(drop(rng));
      s.values.push_back(0.0);
    }
    const double pct = missing_report(s).missing_pct;
    CHECK(pct >= 0.0);
    CHECK(pct <= 100.0);
    CHECK((pct == 0.0) == (s.missing_count() == 0));
  }
}

TEST_CASE("metadata parsing and invariants") {
  const std::string header = "station_id,name,group,region,latitude,longitude,altitude_m\n";
  std::istringstream good(header + "GD,GreatDun,UKH,UK,54.6833,-2.45,847\n"
                                   "VP,Valpelline,IH,Valle d'Aosta,45.8263,7.3273,1029\n");
  const auto meta = parse_metadata(good);
  REQUIRE(meta.size() == 2);
  CHECK(meta[1].region == Region::ValleDAosta);
  CHECK(meta[0].altitude_m == 847.0);

  const auto bad = [&](const std::string& row) {
    std::istringstream in(header + row);
    return kind_of([&] { parse_metadata(in); });
  };
  CHECK(bad("GD,GreatDun,UKH,UK,94,-2.45,847\n") == ErrorKind::Contract);
  CHECK(bad("GD,GreatDun,UKH,UK,54,-2.45,-1\n") == ErrorKind::Contract);
  CHECK(bad("GD,GreatDun,UKH,Piemonte,54,-2.45,800\n") == ErrorKind::Contract);
  CHECK(bad("FS,Fossano,IL,UK,44.5,7.7,403\n") == ErrorKind::Contract);
  CHECK(bad("GD,GreatDun,UKH,UK,54,-2.45,847\nGD,Again,UKH,UK,54,-2.45,847\n") == ErrorKind::Duplicate);
  CHECK(bad("GD,GreatDun,XX,UK,54,-2.45,847\n") == ErrorKind::Parse);
}
