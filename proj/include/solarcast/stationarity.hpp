#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "solarcast/clearsky.hpp"
#include "solarcast/series.hpp"

namespace solarcast {

// Floor for dimensionless ratio denominators.
inline constexpr double kRatioFloor = 1e-6;

// Mean periodic coefficient E[C] per hour-of-year slot.
struct PeriodicTable {
  std::vector<double> coefficients = std::vector<double>(SeriesLayout::slots_per_year, 1.0);
  int years_averaged = 0;

  static PeriodicTable ones() { return {}; }
  double operator[](std::size_t slot) const { return coefficients[slot]; }
  void validate() const;
};

void write_periodic_table(std::ostream& out, const PeriodicTable& table);
PeriodicTable read_periodic_table(std::istream& in);

struct StationarityPipeline {
  SolisParams solis;
  SiteGeometry geo;
  PeriodicTable table;
  int ma_half_width = 4;  // 2 * 4 + 1 = 9 hours

  // Clear-sky value at slot i of `grid`, floored at kClearSkyFloor.
  double clear_sky(const HourlySeries& grid, std::size_t i) const;
  // CSI* -> Wh/m2 factor E[C] * max(H_gh, floor) at slot i of `grid`.
  double scale(const HourlySeries& grid, std::size_t i) const;
};

HourlySeries to_csi(const HourlySeries& x, const StationarityPipeline& pipeline);
// Centred mean over [t - half_width, t + half_width] on the concatenated
// series, clipped at both ends.
HourlySeries moving_average(const HourlySeries& csi, int half_width);
HourlySeries periodic_coefficients(const HourlySeries& csi, const HourlySeries& mm);
PeriodicTable build_periodic_table(const HourlySeries& c);

// Fits the periodic table on `x` (training radiation) for fixed clear-sky parameters.
StationarityPipeline fit_pipeline(const HourlySeries& x, const SiteGeometry& geo, const SolisParams& solis,
                                  int ma_half_width = 4);

HourlySeries to_csi_star(const HourlySeries& x, const StationarityPipeline& pipeline);
// Wh/m2 on the grid of `csi_star`.
HourlySeries invert_csi_star(const HourlySeries& csi_star, const StationarityPipeline& pipeline);

struct VcResult {
  double vc = 0.0;
  bool undefined = false;
};

VcResult variation_coefficient(std::span<const double> values);

enum class FisherMode {
  daily,   // N years x p = 3285 hour-of-year slots
  yearly,  // N days x p = 9 daylight hours
};

struct FisherResult {
  double f_c = 0.0;
  double v_p = 0.0;
  double v_r = 0.0;
  std::size_t p = 0;  // measures per period
  std::size_t n = 0;  // periods
  double f_limit = 0.0;
  bool seasonal = false;
};

// Two-way variance-ratio test; rows are periods, columns are the p measures.
FisherResult fisher_test(std::span<const double> values, std::size_t period, double alpha = 0.05);
FisherResult fisher_test(const HourlySeries& s, FisherMode mode, double alpha = 0.05);

}  // namespace solarcast
