#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "solarcast/clearsky.hpp"
#include "solarcast/series.hpp"

namespace solarcast {

// Two-state clear/cloudy Markov chain stepped every hour; cloudy hours draw
// their attenuation from Beta(alpha, beta).
struct CloudProcess {
  double p_clear_to_cloudy = 0.08;
  double p_cloudy_to_clear = 0.12;
  double beta_alpha = 2.5;
  double beta_beta = 2.0;
  bool start_cloudy = false;

  void validate() const;
};

// NWP stand-in: forecast = truth + persistent AR(1) error.
struct ForecastNoise {
  double nebulosity_sigma = 0.8;  // octas, stationary std
  double nebulosity_phi = 0.7;
  bool quantize_octas = true;
  double pressure_sigma = 150.0;  // Pa
  double temperature_sigma = 0.8; // degC
  double rain_sigma = 0.2;        // mm
};

// X(t) = (a(t) cos(w1 (d - d_solstice)) + b(t) cos(w2 (h - 12))) R(t), clamped at 0.
struct SynthConfig {
  int start_year = 2001;
  double omega1 = 2.0 * 3.14159265358979323846 / 365.25;  // rad per day
  double omega2 = 2.0 * 3.14159265358979323846 / 24.0;    // rad per hour
  double a0 = 255.0;           // Wh/m2, seasonal amplitude
  double b0 = 645.0;           // Wh/m2, diurnal amplitude
  double envelope_drift = 0.03;  // relative, over a 4-year cycle
  double solstice_day = 172.0;
  CloudProcess cloud;
  ForecastNoise noise;
  std::uint64_t seed = 1;

  void validate() const;
};

// Clear envelope at a calendar day and daylight slot.
double synth_envelope(const SynthConfig& cfg, Day d, int slot);

struct RadiationSample {
  Dataset data;
  HourlySeries attenuation;  // R(t)
};

RadiationSample gen_radiation(const SynthConfig& cfg, int years);

// AR(p) with N(0, sigma^2) innovations after a 1000-sample burn-in.
std::vector<double> gen_ar(std::span<const double> phi, double sigma, std::size_t n, std::uint64_t seed);

// Hourly sunny/cloudy regime chain over a clear-sky-index process on the
// Solis envelope of `site`.
struct RegimeConfig {
  int start_year = 2001;
  SiteGeometry site{41.92, 8.73, 10.0};
  SolisParams solis{};
  double p_sunny_to_cloudy = 0.04;  // per hour
  double p_cloudy_to_sunny = 0.08;
  // Scales both rates by (1 +/- a cos) so that cloudy spells cluster in winter.
  double winter_cloudiness = 0.0;
  bool start_cloudy = false;
  // Sunny days: AR(1) around sunny_mean.
  double sunny_mean = 0.93;
  double sunny_phi = 0.7;
  double sunny_sigma = 0.025;
  // Cloudy days: hidden cover c(t), AR(1) clamped to [0, 1]; k = 1 - depth c^2 + noise.
  double cover_mean = 0.55;
  double cover_phi = 0.7;
  double cover_sigma = 0.3;
  double cloud_depth = 0.85;
  double cloudy_sigma = 0.02;
  // Nebulosity forecast error: AR(1) base noise plus sunny-day false alarms.
  double nwp_sigma = 0.3;
  double nwp_phi = 0.5;
  double false_alarm_start = 0.15;  // per sunny hour
  double false_alarm_stop = 0.3;
  double false_alarm_octas = 5.0;
  // Afternoon haze missing from the Solis curve, strongest in summer.
  double haze_amplitude = 0.12;
  ForecastNoise noise;
  std::uint64_t seed = 7;

  void validate() const;
};

struct RegimeSample {
  Dataset data;
  HourlySeries csi;            // true clear-sky index
  std::vector<bool> cloudy;    // regime label per slot
};

RegimeSample gen_regime_switch(const RegimeConfig& cfg, int years);

}  // namespace solarcast
