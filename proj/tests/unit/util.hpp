#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

#include "solarcast/series.hpp"

namespace testutil {

using solarcast::Day;
using solarcast::HourlySeries;
using namespace std::chrono;

inline Day ymd(int y, unsigned m, unsigned d) { return Day{year{y} / month{m} / day{d}}; }

inline std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline std::vector<double> gaussian(std::size_t n, double mean, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline HourlySeries random_series(Day first, std::size_t days, double lo, double hi, std::uint64_t seed) {
  return HourlySeries(first, uniform(days * solarcast::SeriesLayout::hours_per_day, lo, hi, seed));
}

// 365-day years starting on 2001-01-01 (no leap day up to 2003).
inline HourlySeries plain_years(int years, double lo, double hi, std::uint64_t seed) {
  return random_series(ymd(2001, 1, 1), static_cast<std::size_t>(years) * 365, lo, hi, seed);
}

inline solarcast::ExogenousPanel random_panel(const HourlySeries& grid, std::uint64_t seed) {
  const Day d = grid.first_day();
  const std::size_t days = grid.days();
  return {random_series(d, days, 0.0, 8.0, seed), random_series(d, days, 99000.0, 103000.0, seed + 1),
          random_series(d, days, -5.0, 35.0, seed + 2), random_series(d, days, 0.0, 5.0, seed + 3)};
}

}  // namespace testutil
