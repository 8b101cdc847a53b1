#include "solarcast/astro.hpp"

#include <cmath>

namespace solarcast::astro {

namespace {

double day_angle(int day_of_year) noexcept { return 2.0 * pi * (day_of_year - 1) / 365.0; }

}  // namespace

double declination(int day_of_year) noexcept {
  const double g = day_angle(day_of_year);
  return 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) - 0.006758 * std::cos(2 * g) +
         0.000907 * std::sin(2 * g) - 0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);
}

double equation_of_time(int day_of_year) noexcept {
  const double g = day_angle(day_of_year);
  return 229.18 * (0.000075 + 0.001868 * std::cos(g) - 0.032077 * std::sin(g) -
                   0.014615 * std::cos(2 * g) - 0.040849 * std::sin(2 * g));
}

double eccentricity_correction(int day_of_year) noexcept {
  return 1.0 + 0.033 * std::cos(2.0 * pi * day_of_year / 365.0);
}

double hour_angle(double solar_hour) noexcept { return deg2rad(15.0 * (solar_hour - 12.0)); }

}  // namespace solarcast::astro
