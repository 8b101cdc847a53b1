#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace solarcast {

// Fixed hourly grid: nine daylight hours (8:00 to 16:00 true solar time) and
// 365-day years for the hour-of-year index.
struct SeriesLayout {
  static constexpr int hours_per_day = 9;
  static constexpr int day_start_hour = 8;
  static constexpr int days_per_year = 365;
  static constexpr int slots_per_year = days_per_year * hours_per_day;  // 3285
};

using Day = std::chrono::sys_days;

struct SiteGeometry {
  double latitude = 0.0;   // degrees north
  double longitude = 0.0;  // degrees east
  double altitude = 0.0;   // m asl

  void validate() const;
};

// Hourly values on the daylight grid, starting at slot 0 of `first_day` and
// covering a whole number of consecutive calendar days. Missing slots hold NaN
// and are flagged in the mask.
class HourlySeries {
 public:
  HourlySeries() = default;
  HourlySeries(Day first_day, std::vector<double> values, std::vector<bool> missing = {});

  static HourlySeries constant(Day first_day, std::size_t days, double value);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t days() const noexcept { return values_.size() / SeriesLayout::hours_per_day; }
  bool empty() const noexcept { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }

  bool missing(std::size_t i) const { return missing_[i]; }
  const std::vector<bool>& missing_mask() const noexcept { return missing_; }
  std::size_t missing_count() const noexcept;
  bool has_missing() const noexcept { return missing_count() > 0; }

  Day first_day() const noexcept { return first_day_; }
  Day last_day() const noexcept;
  Day day(std::size_t i) const noexcept;
  std::chrono::year_month_day date(std::size_t i) const noexcept;
  unsigned month(std::size_t i) const noexcept;
  int day_of_year(std::size_t i) const noexcept;  // 1..366
  static int slot(std::size_t i) noexcept {
    return static_cast<int>(i % SeriesLayout::hours_per_day);
  }
  static int hour(std::size_t i) noexcept { return SeriesLayout::day_start_hour + slot(i); }
  // Hour-of-year index into 3285-slot tables; day 366 reuses day 365.
  std::size_t year_slot(std::size_t i) const noexcept;
  // Index of the first slot of `d`, which must lie inside the series.
  std::size_t index_of(Day d) const;

  // Same grid, new values; the mask is recomputed from NaN entries.
  HourlySeries with_values(std::vector<double> values) const;
  HourlySeries slice_days(std::size_t first_day_index, std::size_t day_count) const;
  bool same_grid(const HourlySeries& other) const noexcept;

 private:
  Day first_day_{};
  std::vector<double> values_;
  std::vector<bool> missing_;
};

int day_of_year(Day d) noexcept;
std::size_t year_slot_index(int day_of_year, int slot) noexcept;

// Numerical-weather-prediction forecast columns, each valid at its own slot.
struct ExogenousPanel {
  HourlySeries nebulosity;   // octas, 0..8
  HourlySeries pressure;     // Pa
  HourlySeries temperature;  // degC
  HourlySeries rain;         // mm

  void validate(const HourlySeries& reference) const;
  ExogenousPanel slice_days(std::size_t first_day_index, std::size_t day_count) const;
};

struct Dataset {
  HourlySeries ghi;  // Wh/m2
  ExogenousPanel panel;

  void validate() const { panel.validate(ghi); }
  Dataset slice_days(std::size_t first_day_index, std::size_t day_count) const;
};

enum class TimeBasis { solar, utc };

struct CsvSchema {
  std::string timestamp = "timestamp";
  std::string ghi = "ghi";
  std::string nebulosity = "nebulosity";
  std::string pressure = "pressure";
  std::string temperature = "temperature";
  std::string rain = "rain";
  TimeBasis basis = TimeBasis::solar;
};

Dataset read_series(std::istream& in, const CsvSchema& schema = {}, const SiteGeometry& site = {});
Dataset load_series(const std::filesystem::path& path, const CsvSchema& schema = {},
                    const SiteGeometry& site = {});

struct DerivedColumn {
  std::string name;
  const HourlySeries* series;
};

// Timestamps are written in true solar time.
void write_series(std::ostream& out, const Dataset& data, std::span<const DerivedColumn> extra = {});
void save_series(const std::filesystem::path& path, const Dataset& data,
                 std::span<const DerivedColumn> extra = {});

std::string format_timestamp(Day d, int hour);
// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

// Fills each missing slot with the mean of observed values at the same hour
// of day. Refuses when more than `max_missing_fraction` of slots are missing.
HourlySeries clean_missing(const HourlySeries& s, double max_missing_fraction = 0.10);
Dataset clean_missing(const Dataset& d, double max_missing_fraction = 0.10);

struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;

  double apply(double x) const noexcept { return scale * x + offset; }
  double invert(double y) const noexcept { return (y - offset) / scale; }
};

// Maps min(values) to lo and max(values) to hi. NaN entries are ignored.
AffineMap fit_interval(std::span<const double> values, double lo, double hi);
std::pair<HourlySeries, AffineMap> normalize_interval(const HourlySeries& s, double lo, double hi);
HourlySeries invert_interval(const HourlySeries& s, const AffineMap& map);

// Chronological split on the calendar-year boundary after `train_years` years.
std::pair<Dataset, Dataset> split_train_test(const Dataset& d, int train_years);
int calendar_years(const HourlySeries& s) noexcept;

}  // namespace solarcast
