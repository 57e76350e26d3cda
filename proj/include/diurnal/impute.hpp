/**
 * @file impute.hpp
 * @brief Seasonally segmented gap filling.
 *
 * The series is split into blocks by a key on the timestamp (calendar month by default).
 * Each block's slots, taken across all years in time order, form one sub-series that is
 * interpolated on its own ordinal positions.
 */
#pragma once

#include <functional>
#include <string>

#include "diurnal/civil_time.hpp"
#include "diurnal/ingest.hpp"

namespace diurnal {

enum class Interpolation { Linear };

struct SeasonalBlockPlan {
  std::string name{"month"};
  std::function<int(Timestamp)> block_key;
  Interpolation interpolation{Interpolation::Linear};

  /// Block = calendar month 1-12.
  static SeasonalBlockPlan monthly();
};

/**
 * @brief Fills every masked slot.
 *
 * Observed values pass through untouched. Inner gaps are interpolated linearly between the
 * nearest observed block neighbours; gaps at a block's ends copy the nearest observed value.
 * Throws ErrorKind::ImputationImpossible naming the block when a block has gaps but no data.
 */
TemperatureSeries seasonal_split_impute(const TemperatureSeries& series, const SeasonalBlockPlan& plan);

}  // namespace diurnal
