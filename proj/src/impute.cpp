/**
 * @file impute.cpp
 * @brief Seasonal-split linear imputation.
 */
#include "diurnal/impute.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "diurnal/error.hpp"

namespace diurnal {

SeasonalBlockPlan SeasonalBlockPlan::monthly() {
  return SeasonalBlockPlan{"month", [](Timestamp t) { return date_of(t).month; }, Interpolation::Linear};
}

TemperatureSeries seasonal_split_impute(const TemperatureSeries& series, const SeasonalBlockPlan& plan) {
  series.validate();
  require(static_cast<bool>(plan.block_key), "seasonal block plan has no block key");

  std::map<int, std::vector<std::size_t>> blocks;
  for (std::size_t k = 0; k < series.size(); ++k) {
    blocks[plan.block_key(series.time_at(k))].push_back(k);
  }

  TemperatureSeries out = series;
  for (const auto& [label, slots] : blocks) {
    std::vector<std::size_t> observed;  // positions within the block
    for (std::size_t p = 0; p < slots.size(); ++p) {
      if (!series.missing[slots[p]]) {
        observed.push_back(p);
      }
    }
    if (observed.size() == slots.size()) {
      continue;
    }
    if (observed.empty()) {
      fail(ErrorKind::ImputationImpossible,
           "cannot impute: " + plan.name + " block " + std::to_string(label) + " has no observed values");
    }
    const auto value_at = [&](std::size_t p) { return series.values[slots[p]]; };

    for (std::size_t p = 0; p < observed.front(); ++p) {
      out.values[slots[p]] = value_at(observed.front());
    }
    for (std::size_t p = observed.back() + 1; p < slots.size(); ++p) {
      out.values[slots[p]] = value_at(observed.back());
    }
    for (std::size_t i = 0; i + 1 < observed.size(); ++i) {
      const std::size_t lo = observed[i];
      const std::size_t hi = observed[i + 1];
      const double v0 = value_at(lo);
      const double v1 = value_at(hi);
      const double span = static_cast<double>(hi - lo);
      for (std::size_t p = lo + 1; p < hi; ++p) {
        const double frac = static_cast<double>(p - lo) / span;
        out.values[slots[p]] = std::clamp(v0 + (v1 - v0) * frac, std::min(v0, v1), std::max(v0, v1));
      }
    }
  }
  out.missing.assign(out.size(), false);
  return out;
}

}  // namespace diurnal
