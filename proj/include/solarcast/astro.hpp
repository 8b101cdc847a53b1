#pragma once

// Low-order solar astronomy on the day-of-year (Spencer's Fourier series).

namespace solarcast::astro {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double solar_constant = 1367.0;  // W/m2

constexpr double deg2rad(double d) noexcept { return d * pi / 180.0; }
constexpr double rad2deg(double r) noexcept { return r * 180.0 / pi; }

// radians
double declination(int day_of_year) noexcept;
// minutes; true solar time = mean solar time + equation_of_time
double equation_of_time(int day_of_year) noexcept;
// 1 + 0.033 cos(2 pi day / 365)
double eccentricity_correction(int day_of_year) noexcept;
// radians, negative in the morning; `solar_hour` is true solar time in hours
double hour_angle(double solar_hour) noexcept;

}  // namespace solarcast::astro
