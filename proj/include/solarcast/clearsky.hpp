#pragma once

#include <cstddef>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast {

struct SolisParams {
  double tau = 0.3;  // global total atmospheric optical depth
  double b = 0.5;    // fitting exponent

  void validate() const;
};

struct SolarPosition {
  double elevation = 0.0;         // radians
  double extraterrestrial = 0.0;  // Wh/m2, eccentricity corrected
};

// Floor applied wherever the clear-sky value is used as a divisor (Wh/m2).
inline constexpr double kClearSkyFloor = 5.0;

SolarPosition solar_position(const SiteGeometry& geo, int day_of_year, int slot);

// Simplified Solis: H'0 exp(-tau / sin^b h) sin h, zero at or below the horizon.
double solis_ghi(const SolarPosition& pos, const SolisParams& params) noexcept;

double clear_sky_ghi(const SiteGeometry& geo, const SolisParams& params, int day_of_year, int slot);

// Clear-sky curve on the grid of `grid`.
HourlySeries clear_sky_series(const HourlySeries& grid, const SiteGeometry& geo, const SolisParams& params);

struct ClearDayOptions {
  int envelope_half_width_days = 15;
  double min_mean_ratio = 0.9;    // day must reach the running envelope
  double max_ratio_variance = 2.5e-3;
  std::size_t min_clear_days = 5;
};

// Day indices whose radiation-to-running-envelope profile is flat and close to 1.
std::vector<std::size_t> detect_clear_days(const HourlySeries& ghi, const ClearDayOptions& opts = {});

struct SolisFit {
  SolisParams params;
  double nrmse = 0.0;  // fraction, over clear-day samples
  std::size_t clear_days = 0;
};

// Least-squares (tau, b) over the clear days of `ghi`: coarse grid, then a
// projected Levenberg-Marquardt refinement.
SolisFit fit_solis(const HourlySeries& ghi, const SiteGeometry& geo, const ClearDayOptions& opts = {});

}  // namespace solarcast
