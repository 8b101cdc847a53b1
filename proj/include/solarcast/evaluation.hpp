#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast {

// Root-mean-square error over root-mean-square of the measurements, in percent.
double nrmse(std::span<const double> measured, std::span<const double> predicted);

// x_hat(t + 1) = x(t): element k forecasts measured[k + 1].
std::vector<double> persistence(std::span<const double> measured);

// Meteorological seasons: DJF, MAM, JJA, SON.
enum class Season { winter = 0, spring = 1, summer = 2, autumn = 3 };
inline constexpr std::size_t kSeasons = 4;
inline constexpr std::array<const char*, kSeasons> kSeasonNames{"winter", "spring", "summer", "autumn"};

Season season_of_month(unsigned month);

using SeasonIndex = std::array<std::vector<std::size_t>, kSeasons>;

// Positions k of `targets` (grid indices) grouped by the season of grid[targets[k]].
SeasonIndex seasonal_split(const HourlySeries& grid, std::span<const std::size_t> targets);
// Every slot of `grid`.
SeasonIndex seasonal_split(const HourlySeries& grid);

struct ScoreReport {
  std::string model;
  double annual = 0.0;
  std::array<double, kSeasons> seasonal{};  // NaN for an empty bucket
  std::size_t n_annual = 0;
  std::array<std::size_t, kSeasons> n_seasonal{};
  bool best_annual = false;
  std::array<bool, kSeasons> best_seasonal{};
};

// Seasonal values are normalized by each bucket's own measurements.
ScoreReport score(const std::string& model, const HourlySeries& grid, std::span<const std::size_t> targets,
                  std::span<const double> measured, std::span<const double> predicted);

struct ModelForecast {
  std::string name;
  std::vector<double> predicted;  // aligned with the shared targets
};

struct UsageBreakdown {
  std::size_t ar_annual = 0;
  std::size_t ann_annual = 0;
  std::array<std::size_t, kSeasons> ar{};
  std::array<std::size_t, kSeasons> ann{};
};

struct ComparisonReport {
  std::vector<ScoreReport> rows;
  bool has_usage = false;
  UsageBreakdown usage;
};

// Scores every model on the same targets and marks the minimum of each column
// (ties are all marked).
ComparisonReport compare_models(const HourlySeries& grid, std::span<const std::size_t> targets,
                                std::span<const double> measured, std::span<const ModelForecast> models);

// chose_ar[k] refers to grid index targets[k].
UsageBreakdown usage_breakdown(const HourlySeries& grid, std::span<const std::size_t> targets,
                               const std::vector<bool>& chose_ar);

nlohmann::json to_json(const ComparisonReport& r);
// Columns: model,annual,winter,spring,summer,autumn,best
void write_report_csv(std::ostream& out, const ComparisonReport& r);

// Columns: timestamp,measured,predicted
void write_scatter_csv(std::ostream& out, const HourlySeries& grid, std::span<const std::size_t> targets,
                       std::span<const double> measured, std::span<const double> predicted);

}  // namespace solarcast
