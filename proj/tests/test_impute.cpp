#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "diurnal/error.hpp"
#include "diurnal/impute.hpp"
#include "oracles.hpp"

using namespace diurnal;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SeasonalBlockPlan single_block() { return {"all", [](Timestamp) { return 0; }, Interpolation::Linear}; }

TemperatureSeries make(const std::vector<std::optional<double>>& v, Duration step = kHour, Timestamp start = 0) {
  TemperatureSeries s;
  s.station_id = "T";
  s.start = start;
  s.step = step;
  for (const auto& x : v) {
    s.values.push_back(x ? *x : kNaN);
    s.missing.push_back(!x);
  }
  return s;
}

// two years of daily readings with random gaps
TemperatureSeries random_daily(std::mt19937_64& rng, double drop_rate) {
  std::bernoulli_distribution drop(drop_rate);
  std::normal_distribution<double> temp(10.0, 5.0);
  std::vector<std::optional<double>> v;
  for (int d = 0; d < 731; ++d) {
    const double t = temp(rng);
    v.push_back(drop(rng) ? std::nullopt : std::optional<double>(t));
  }
  return make(v, kDay, days_from_civil(2003, 1, 1) * kDay);
}

}  // namespace

TEST_CASE("impute: no gaps is the identity") {
  const auto s = make({1.0, 2.0, 3.0});
  const auto out = seasonal_split_impute(s, SeasonalBlockPlan::monthly());
  CHECK(out.values == s.values);
  CHECK(out.missing_count() == 0);
}

TEST_CASE("impute: linear midpoint") {
  const auto out = seasonal_split_impute(make({10.0, std::nullopt, 14.0}), single_block());
  CHECK(out.values == std::vector<double>{10.0, 12.0, 14.0});
}

TEST_CASE("impute: flat extension at block edges") {
  const std::vector<std::optional<double>> block{std::nullopt, 5.0, std::nullopt};
  CHECK(oracle::impute_block(block) == std::vector<double>{5.0, 5.0, 5.0});
  const auto out = seasonal_split_impute(make(block), single_block());
  CHECK(out.values == std::vector<double>{5.0, 5.0, 5.0});
}

TEST_CASE("impute: fully missing block names the block") {
  // January observed, February entirely missing
  std::vector<std::optional<double>> v;
  for (int d = 0; d < 31; ++d) v.emplace_back(1.0);
  for (int d = 0; d < 28; ++d) v.emplace_back(std::nullopt);
  const auto s = make(v, kDay, days_from_civil(2003, 1, 1) * kDay);
  try {
    seasonal_split_impute(s, SeasonalBlockPlan::monthly());
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ImputationImpossible);
    CHECK(std::string(e.what()).find("month block 2") != std::string::npos);
  }
}

TEST_CASE("impute: blocks concatenate across years in time order") {
  // the January block runs Jan 2003 then Jan 2004
  std::vector<std::optional<double>> v(365 + 31, 0.0);
  v[30] = 2.0;             // 2003-01-31
  v[365] = std::nullopt;   // 2004-01-01
  v[366] = 4.0;            // 2004-01-02
  const auto out = seasonal_split_impute(make(v, kDay, days_from_civil(2003, 1, 1) * kDay),
                                         SeasonalBlockPlan::monthly());
  CHECK(out.values[365] == doctest::Approx(3.0));
}

TEST_CASE("impute matches the reference interpolator block by block") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_daily(rng, 0.3);
    const auto out = seasonal_split_impute(s, SeasonalBlockPlan::monthly());
    std::map<int, std::vector<std::size_t>> blocks;
    for (std::size_t k = 0; k < s.size(); ++k) blocks[date_of(s.time_at(k)).month].push_back(k);
    for (const auto& [m, slots] : blocks) {
      std::vector<std::optional<double>> b;
      for (const auto k : slots) b.push_back(s.missing[k] ? std::nullopt : std::optional<double>(s.values[k]));
      const auto expect = oracle::impute_block(b);
      for (std::size_t p = 0; p < slots.size(); ++p) {
        CHECK(out.values[slots[p]] == doctest::Approx(expect[p]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("impute properties: idempotence, pass-through, boundedness") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_daily(rng, 0.25);
    const auto once = seasonal_split_impute(s, SeasonalBlockPlan::monthly());
    const auto twice = seasonal_split_impute(once, SeasonalBlockPlan::monthly());
    CHECK(once.values == twice.values);
    std::map<int, std::pair<double, double>> range;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.missing[k]) continue;
      CHECK(once.values[k] == s.values[k]);
      const int m = date_of(s.time_at(k)).month;
      auto [it, fresh] = range.try_emplace(m, s.values[k], s.values[k]);
      it->second.first = std::min(it->second.first, s.values[k]);
      it->second.second = std::max(it->second.second, s.values[k]);
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& [lo, hi] = range.at(date_of(s.time_at(k)).month);
      CHECK(once.values[k] >= lo);
      CHECK(once.values[k] <= hi);
    }
  }
}

TEST_CASE("impute property: seasonal isolation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_daily(rng, 0.3);
    auto changed = s;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (!s.missing[k] && date_of(s.time_at(k)).month == 6) changed.values[k] += 100.0;
    }
    const auto a = seasonal_split_impute(s, SeasonalBlockPlan::monthly());
    const auto b = seasonal_split_impute(changed, SeasonalBlockPlan::monthly());
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (date_of(s.time_at(k)).month != 6) CHECK(a.values[k] == b.values[k]);
    }
  }
}
